#pragma once

#include <string>

namespace qlink {

// Fiber channel; transmission t = 10^(-attenuation * length / 10).
struct ChannelModel {
    double length_km = 0.0;
    double attenuation_db_per_km = 0.2;

    ChannelModel() = default;
    ChannelModel(double length, double attenuation);
};

double channel_transmission(const ChannelModel& channel);

enum class WcpVariant { bb84, sarg };

// Prepare-and-measure weak-pulse protocol parameters. The insecure threshold
// is the photon number from which a pulse leaks the full bit to a
// number-splitting eavesdropper (2 for BB84; 3 for SARG, whose sifting keeps
// two-photon pulses only partially readable).
//
// Decoy-state and phase-coherence schemes (differential phase shift, coherent
// one way) sidestep the splitting attack differently and run at mean photon
// numbers around 0.2-0.5 even over long distances; they have no rate model
// here.
struct WcpProtocol {
    WcpVariant variant = WcpVariant::bb84;
    double sifting_factor = 0.5;
    int insecure_threshold_photons = 2;

    static WcpProtocol bb84() { return {WcpVariant::bb84, 0.5, 2}; }
    static WcpProtocol sarg() { return {WcpVariant::sarg, 0.25, 3}; }
    std::string name() const { return variant == WcpVariant::bb84 ? "bb84" : "sarg"; }
};

struct PoissonStats {
    double p_vacuum = 0.0;
    double p_single = 0.0;
    double p_multi = 0.0;                // P(n >= 2)
    double p_multi_given_nonempty = 0.0; // P(n >= 2 | n >= 1), 0 at mu = 0
};

PoissonStats poisson_stats(double mu);

// Secure against photon-number splitting iff the channel transmission is at
// least the multi-photon fraction of non-empty pulses.
bool pns_secure(double mu, double t);

// Leading-order secure-rate model: detected signal mu*t*eta minus the
// insecure multi-photon mass, mu^2/2 (BB84) or mu^3/6 (SARG). These
// polynomial penalties are the small-mu Poisson tails; they keep the
// textbook optima mu* = t*eta (BB84) and mu* = sqrt(2*t*eta) (SARG) exact
// over the whole sweep domain.
double secure_rate(const WcpProtocol& protocol, double mu, const ChannelModel& channel,
                   double detector_eta, double rep_rate_hz);

struct OptimalMu {
    double mu = 0.0;
    double rate_bits_per_s = 0.0;
    bool boundary = false;   // optimum pinned to the edge of the search domain
    bool zero_rate = false;  // flat-zero landscape, mu meaningless
};

// Brute-force maximization of secure_rate over mu in (0, 1]: grid step 1e-4,
// then golden-section refinement to 1e-6.
OptimalMu optimal_mu(const WcpProtocol& protocol, const ChannelModel& channel,
                     double detector_eta, double rep_rate_hz = 1.0);

struct DirectTransmission {
    double states_per_s = 0.0;
    double mean_wait_s = 0.0;
};

DirectTransmission direct_transmission_rate(double rep_rate_hz, const ChannelModel& channel);

inline constexpr double kSecondsPerYear = 365.25 * 24.0 * 3600.0;

} // namespace qlink
