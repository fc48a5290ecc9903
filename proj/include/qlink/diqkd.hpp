#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qlink/mixed.hpp"
#include "qlink/sources.hpp"
#include "qlink/wcp.hpp"

namespace qlink {

// Heralded entanglement distribution: a polarization-entangled pair source
// feeds Alice (mode a) and a fiber to Bob (mode b); Bob holds two
// single-photon sources whose photons are tapped with amplitude
// sqrt(bs_transmission) towards a rotated polarization beamsplitter where they
// meet mode b. A D+ & D~+ coincidence heralds entanglement between a and the
// kept mode d.
struct HeraldSchemeParams {
    double pair_p = 1e-3;
    double bs_transmission = 1e-2;
    ChannelModel channel{0.0, 0.2};  // Alice -> Bob fiber on mode b
    double coupling = 0.9;
    DetectorModel station_detectors{DetectorKind::threshold, 0.8, 0.0};
    double repetition_rate_hz = 1e10;
    bool on_demand = true;
    // Bob's two sources: on-demand emission probabilities, or the SPDC pair
    // probability of the heralded variant (heralded by station_detectors).
    double on_demand_p1 = 0.95;
    double on_demand_p2 = 1e-4;
    double heralded_sps_p = 0.01;

    void validate() const;
};

struct HeraldOutcome {
    double herald_probability = 0.0;  // per pulse, incl. source readiness
    TwoQubitState conditional_state;
    double fidelity_to_bell = 0.0;  // fully entangled fraction
    double heralded_rate_hz = 0.0;
    double source_ready_probability = 1.0;  // both Bob sources announced
};

// Full Fock-space simulation of the herald circuit. Throws sim_error when the
// herald probability degenerates (< 1e-15).
HeraldOutcome run_herald_circuit(const HeraldSchemeParams& params, Truncation truncation);

enum class NoClickPolicy { assign_plus_one };

// Analyzer angles are Bloch-sphere angles in the x-z plane: the +/-1-valued
// observable at angle theta is cos(theta) sigma_z + sin(theta) sigma_x.
struct ChshSettings {
    double a1 = 0.0;
    double a2 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    NoClickPolicy no_click_policy = NoClickPolicy::assign_plus_one;
};

// S = E(A1,B1) + E(A1,B2) + E(A2,B1) - E(A2,B2) where each side detects with
// probability eta and a missed detection is assigned outcome +1.
double chsh_value(const TwoQubitState& state, const ChshSettings& settings, double eta);

// Coarse grid over the four analyzer angles (2 degree step) followed by local
// step-halving refinement to 1e-4 rad; ties resolved toward lexicographically
// smaller angles.
std::pair<ChshSettings, double> optimize_chsh(const TwoQubitState& state, double eta);

// Detection efficiency where the optimized singlet CHSH value crosses the
// local bound 2 (root-found by bisection); closed form 2/(1+sqrt(2)).
double detection_threshold();

// Error rate of the key (z) basis with the same detection binning as CHSH.
double binned_qber(const TwoQubitState& state, double eta);

// Asymptotic collective-attack key fraction times the heralded rate:
//   r = max(0, 1 - h(Q) - h((1 + sqrt((S/2)^2 - 1))/2)).
// S <= 2 yields zero (not an error).
double di_key_rate(double s_value, double qber, double heralded_rate_hz);

struct DiqkdRatePoint {
    double distance_km = 0.0;
    std::string variant;        // "heralded" | "on_demand"
    double detection_eff = 0.0; // 0.95 device-independent, 0.8 trusted
    double herald_prob = 0.0;
    double s_value = 0.0;
    double qber = 0.0;
    double key_rate_bits_per_s = 0.0;
};

// Key rate versus distance for both source variants, in the fully
// device-independent mode (detectors at di_eff enter the CHSH binning) and in
// the trusted-detector mode (CHSH at unit efficiency; detector efficiency and
// the dual-rail subspace mass post-select the rate instead).
std::vector<DiqkdRatePoint> rate_vs_distance(const HeraldSchemeParams& base,
                                             const std::vector<double>& distances_km,
                                             Truncation truncation, double di_eff = 0.95,
                                             double trusted_eff = 0.8);

} // namespace qlink
