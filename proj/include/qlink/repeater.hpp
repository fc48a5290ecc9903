#pragma once

#include <variant>
#include <vector>

namespace qlink {

// Doubling repeater chain: N = 2^n elementary links over total_length_km.
struct RepeaterConfig {
    double total_length_km = 1000.0;
    int link_count = 16;  // power of 2
    double attenuation_db_per_km = 0.2;
    double fiber_speed_km_s = 2e5;
    double detector_eff = 0.9;
    double memory_eff = 0.9;
    double fidelity_target = 0.9;
    // Constant c in the quadratic error-growth budget eps = c N^2 p.
    double error_constant = 1.0;

    void validate() const;
    double link_length_km() const { return total_length_km / link_count; }
    int nesting_levels() const;  // log2(link_count)
    // Transmission of one full elementary link (the photon path per
    // generation attempt).
    double link_transmission() const;
    // Linear-optics Bell measurement with memory retrieval on both arms.
    double swap_success() const {
        return 0.5 * memory_eff * memory_eff * detector_eff * detector_eff;
    }
};

// Pair-source elementary link; emission probability <= 0 means "derive the
// largest value the fidelity budget allows".
struct DlczLink {
    double p = -1.0;
};

// Single-photon-source elementary link; beta <= 0 means "sweep the
// transmitted fraction and keep the rate-optimal value".
struct SpsLink {
    double p1 = 0.95;
    double p2 = 1e-4;
    double beta = -1.0;
};

using LinkArchitecture = std::variant<DlczLink, SpsLink>;

// Largest pair-emission probability compatible with the fidelity target under
// quadratic error growth: p_max = (1 - F) / (c N^2).
double max_allowed_pair_prob(int link_count, double fidelity_target, double c = 1.0);

// Heralded entanglement-generation success probability of one elementary
// link: P0 = 2 p eta_d eta_link (DLCZ) or 2 p1 beta eta_d eta_link (SPS).
double link_success_probability(const LinkArchitecture& arch, const RepeaterConfig& config);

// T0 = (L0 / v) / P0, then T_{k+1} = (3/2) T_k / P_swap_k per nesting level.
// swap_successes must hold one entry per level.
double chain_waiting_time(double p0, const RepeaterConfig& config,
                          const std::vector<double>& swap_successes);

struct RepeaterPoint {
    double rate_hz = 0.0;
    double fidelity = 0.0;
    double link_success = 0.0;
    double emission_prob = 0.0;  // DLCZ p, or SPS p1
    double beta = 0.0;           // SPS only
};

// End-to-end distribution rate and fidelity estimate for one architecture.
// Emission probabilities are auto-derived from the fidelity budget where left
// unset; infeasible targets throw sim_error.
RepeaterPoint repeater_rate(const LinkArchitecture& arch, const RepeaterConfig& config);

struct ArchitectureComparison {
    double p1 = 0.0;
    double dlcz_rate_hz = 0.0;
    double sps_rate_hz = 0.0;
    double ratio = 0.0;  // SPS / DLCZ
};

// Rate ratio SPS/DLCZ versus source efficiency p1 at a fixed fidelity target
// (DLCZ pair probability set by max_allowed_pair_prob, SPS p2 fixed).
std::vector<ArchitectureComparison> compare_architectures(const RepeaterConfig& config,
                                                          const std::vector<double>& p1_values,
                                                          double sps_p2 = 1e-4);

// Source efficiency at which the SPS architecture starts beating DLCZ
// (bisection on the monotone ratio). Throws sim_error when no crossover
// exists in (p1_min, 1).
double sps_crossover_efficiency(const RepeaterConfig& config, double sps_p2 = 1e-4);

} // namespace qlink
