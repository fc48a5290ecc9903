#include "qlink/repeater.hpp"

#include <cmath>
#include <stdexcept>

#include "qlink/errors.hpp"

namespace qlink {

namespace {

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// Vacuum bookkeeping for the SPS architecture. A herald click at the central
// station leaves the complementary memory loaded only when its source fired
// and the photon stayed in the stored arm, u0 = p1 (1 - beta). Coincidence
// swaps reject vacuum at the cost of retries, and the surviving vacuum is
// removed by the final verification; with two parallel chains filtered at the
// link stage, each of the n swap levels, and the final measurement, the
// accepted fraction is u0^(2 (n + 2)).
int vacuum_exponent(const RepeaterConfig& config) {
    return 2 * (config.nesting_levels() + 2);
}

double sps_acceptance(double p1, double beta, const RepeaterConfig& config) {
    const double u0 = p1 * (1.0 - beta);
    return std::pow(u0, vacuum_exponent(config));
}

// Transmitted fraction maximizing beta * acceptance, which is proportional to
// the end-to-end SPS rate at fixed chain. Unimodal; golden-section search.
double best_beta(double p1, const RepeaterConfig& config) {
    auto merit = [&](double beta) { return beta * sps_acceptance(p1, beta, config); };
    double lo = 1e-6, hi = 1.0 - 1e-6;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = merit(x1);
    double f2 = merit(x2);
    while (hi - lo > 1e-9) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = merit(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = merit(x1);
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

void RepeaterConfig::validate() const {
    if (total_length_km <= 0.0) throw std::invalid_argument("repeater: total length must be > 0");
    if (!is_power_of_two(link_count))
        throw std::invalid_argument("repeater: link count must be a power of 2");
    if (attenuation_db_per_km < 0.0) throw std::invalid_argument("repeater: negative attenuation");
    if (fiber_speed_km_s <= 0.0) throw std::invalid_argument("repeater: fiber speed must be > 0");
    for (double eta : {detector_eff, memory_eff})
        if (eta < 0.0 || eta > 1.0)
            throw std::invalid_argument("repeater: efficiencies must lie in [0,1]");
    if (fidelity_target <= 0.0 || fidelity_target >= 1.0)
        throw std::invalid_argument("repeater: fidelity target must lie in (0,1)");
    if (error_constant <= 0.0) throw std::invalid_argument("repeater: error constant must be > 0");
}

int RepeaterConfig::nesting_levels() const {
    int n = 0;
    for (int v = link_count; v > 1; v >>= 1) ++n;
    return n;
}

double RepeaterConfig::link_transmission() const {
    return std::pow(10.0, -attenuation_db_per_km * link_length_km() / 10.0);
}

double max_allowed_pair_prob(int link_count, double fidelity_target, double c) {
    if (link_count < 1) throw std::invalid_argument("max_allowed_pair_prob: link count must be >= 1");
    if (fidelity_target >= 1.0 || fidelity_target <= 0.0)
        throw std::invalid_argument("max_allowed_pair_prob: fidelity target must lie in (0,1)");
    if (c <= 0.0) throw std::invalid_argument("max_allowed_pair_prob: c must be > 0");
    return (1.0 - fidelity_target) / (c * link_count * static_cast<double>(link_count));
}

double link_success_probability(const LinkArchitecture& arch, const RepeaterConfig& config) {
    config.validate();
    const double eta = config.detector_eff * config.link_transmission();
    return std::visit(
        [&](const auto& a) -> double {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, DlczLink>) {
                if (a.p < 0.0 || a.p > 1.0)
                    throw std::invalid_argument("link_success_probability: p out of [0,1]");
                return 2.0 * a.p * eta;
            } else {
                if (a.p1 < 0.0 || a.p1 > 1.0 || a.p2 < 0.0 || a.p2 > a.p1)
                    throw std::invalid_argument("link_success_probability: need 0 <= p2 <= p1 <= 1");
                if (a.beta <= 0.0 || a.beta >= 1.0)
                    throw std::invalid_argument("link_success_probability: beta out of (0,1)");
                return 2.0 * a.p1 * a.beta * eta;
            }
        },
        arch);
}

double chain_waiting_time(double p0, const RepeaterConfig& config,
                          const std::vector<double>& swap_successes) {
    config.validate();
    if (p0 <= 0.0 || p0 > 1.0) throw sim_error("chain_waiting_time: link success probability is 0");
    if (static_cast<int>(swap_successes.size()) != config.nesting_levels())
        throw std::invalid_argument("chain_waiting_time: need one swap probability per level");
    double t = (config.link_length_km() / config.fiber_speed_km_s) / p0;
    for (double ps : swap_successes) {
        if (ps <= 0.0 || ps > 1.0) throw sim_error("chain_waiting_time: swap success probability is 0");
        t *= 1.5 / ps;
    }
    return t;
}

RepeaterPoint repeater_rate(const LinkArchitecture& arch, const RepeaterConfig& config) {
    config.validate();
    const double p_max = max_allowed_pair_prob(config.link_count, config.fidelity_target,
                                               config.error_constant);
    const std::vector<double> swaps(config.nesting_levels(), config.swap_success());

    RepeaterPoint pt;
    if (const auto* dlcz = std::get_if<DlczLink>(&arch)) {
        DlczLink link = *dlcz;
        if (link.p <= 0.0) link.p = p_max;
        if (link.p > p_max + 1e-15)
            throw sim_error("repeater_rate: pair probability exceeds the fidelity budget");
        pt.emission_prob = link.p;
        pt.link_success = link_success_probability(link, config);
        pt.fidelity = 1.0 - config.error_constant * config.link_count *
                                static_cast<double>(config.link_count) * link.p;
        pt.rate_hz = 1.0 / chain_waiting_time(pt.link_success, config, swaps);
        return pt;
    }

    SpsLink link = std::get<SpsLink>(arch);
    if (link.p1 <= 0.0) throw sim_error("repeater_rate: SPS source efficiency is 0");
    const double two_photon_error = config.error_constant * config.link_count *
                                    static_cast<double>(config.link_count) *
                                    (link.p2 / link.p1);
    if (two_photon_error > 1.0 - config.fidelity_target)
        throw sim_error("repeater_rate: fidelity target unreachable (two-photon emission too high)");
    if (link.beta <= 0.0) link.beta = best_beta(link.p1, config);
    pt.emission_prob = link.p1;
    pt.beta = link.beta;
    pt.link_success = link_success_probability(link, config);
    pt.fidelity = 1.0 - two_photon_error;
    pt.rate_hz = sps_acceptance(link.p1, link.beta, config) /
                 chain_waiting_time(pt.link_success, config, swaps);
    return pt;
}

std::vector<ArchitectureComparison> compare_architectures(const RepeaterConfig& config,
                                                          const std::vector<double>& p1_values,
                                                          double sps_p2) {
    const RepeaterPoint dlcz = repeater_rate(DlczLink{}, config);
    std::vector<ArchitectureComparison> rows;
    rows.reserve(p1_values.size());
    for (double p1 : p1_values) {
        ArchitectureComparison row;
        row.p1 = p1;
        row.dlcz_rate_hz = dlcz.rate_hz;
        const RepeaterPoint sps = repeater_rate(SpsLink{p1, sps_p2, -1.0}, config);
        row.sps_rate_hz = sps.rate_hz;
        row.ratio = sps.rate_hz / dlcz.rate_hz;
        rows.push_back(row);
    }
    return rows;
}

double sps_crossover_efficiency(const RepeaterConfig& config, double sps_p2) {
    config.validate();
    // Smallest feasible p1 given the two-photon fidelity budget.
    const double p1_min =
        std::min(0.999, config.error_constant * config.link_count *
                            static_cast<double>(config.link_count) * sps_p2 /
                            (1.0 - config.fidelity_target) * (1.0 + 1e-9)) +
        1e-9;
    auto ratio_at = [&](double p1) {
        return compare_architectures(config, {p1}, sps_p2).front().ratio;
    };
    double lo = p1_min, hi = 1.0;
    if (ratio_at(hi) < 1.0 || ratio_at(lo) > 1.0)
        throw sim_error("sps_crossover_efficiency: no crossover in the feasible range");
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (ratio_at(mid) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace qlink
