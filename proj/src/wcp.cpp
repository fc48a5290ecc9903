#include "qlink/wcp.hpp"

#include <cmath>
#include <stdexcept>

namespace qlink {

ChannelModel::ChannelModel(double length, double attenuation)
    : length_km(length), attenuation_db_per_km(attenuation) {
    if (length < 0.0) throw std::invalid_argument("ChannelModel: negative length");
    if (attenuation < 0.0) throw std::invalid_argument("ChannelModel: negative attenuation");
}

double channel_transmission(const ChannelModel& channel) {
    return std::pow(10.0, -channel.attenuation_db_per_km * channel.length_km / 10.0);
}

PoissonStats poisson_stats(double mu) {
    if (mu < 0.0) throw std::invalid_argument("poisson_stats: negative mu");
    PoissonStats st;
    st.p_vacuum = std::exp(-mu);
    st.p_single = mu * std::exp(-mu);
    st.p_multi = 1.0 - std::exp(-mu) * (1.0 + mu);
    const double p_nonempty = 1.0 - st.p_vacuum;
    st.p_multi_given_nonempty = p_nonempty > 0.0 ? st.p_multi / p_nonempty : 0.0;
    return st;
}

bool pns_secure(double mu, double t) {
    if (mu < 0.0) throw std::invalid_argument("pns_secure: negative mu");
    if (t <= 0.0 || t > 1.0) throw std::invalid_argument("pns_secure: transmission out of (0,1]");
    return t >= poisson_stats(mu).p_multi_given_nonempty;
}

double secure_rate(const WcpProtocol& protocol, double mu, const ChannelModel& channel,
                   double detector_eta, double rep_rate_hz) {
    if (mu < 0.0) throw std::invalid_argument("secure_rate: negative mu");
    if (detector_eta < 0.0 || detector_eta > 1.0)
        throw std::invalid_argument("secure_rate: detector efficiency out of [0,1]");
    if (rep_rate_hz <= 0.0) throw std::invalid_argument("secure_rate: repetition rate must be > 0");
    const double t = channel_transmission(channel);
    const double insecure = protocol.insecure_threshold_photons <= 2 ? mu * mu / 2.0
                                                                     : mu * mu * mu / 6.0;
    const double net = mu * t * detector_eta - insecure;
    return rep_rate_hz * protocol.sifting_factor * std::max(0.0, net);
}

OptimalMu optimal_mu(const WcpProtocol& protocol, const ChannelModel& channel,
                     double detector_eta, double rep_rate_hz) {
    constexpr double kGridStep = 1e-4;
    constexpr double kRefineTol = 1e-6;
    constexpr double kMuMax = 1.0;

    auto rate = [&](double mu) {
        return secure_rate(protocol, mu, channel, detector_eta, rep_rate_hz);
    };

    OptimalMu best;
    for (double mu = kGridStep; mu <= kMuMax + 1e-12; mu += kGridStep) {
        const double r = rate(mu);
        if (r > best.rate_bits_per_s) {
            best.rate_bits_per_s = r;
            best.mu = mu;
        }
    }
    if (best.rate_bits_per_s <= 0.0) {
        best.zero_rate = true;
        best.mu = 0.0;
        return best;
    }

    // Golden-section refinement around the grid maximum.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::max(kGridStep / 2.0, best.mu - kGridStep);
    double hi = std::min(kMuMax, best.mu + kGridStep);
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = rate(x1);
    double f2 = rate(x2);
    while (hi - lo > kRefineTol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = rate(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = rate(x1);
        }
    }
    best.mu = 0.5 * (lo + hi);
    best.rate_bits_per_s = rate(best.mu);
    best.boundary = best.mu >= kMuMax - kGridStep;
    return best;
}

DirectTransmission direct_transmission_rate(double rep_rate_hz, const ChannelModel& channel) {
    if (rep_rate_hz <= 0.0)
        throw std::invalid_argument("direct_transmission_rate: repetition rate must be > 0");
    DirectTransmission d;
    d.states_per_s = rep_rate_hz * channel_transmission(channel);
    d.mean_wait_s = 1.0 / d.states_per_s;
    return d;
}

} // namespace qlink
