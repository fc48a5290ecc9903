#pragma once

#include <variant>

#include "qlink/mixed.hpp"

namespace qlink {

// Light-source models. Emission probabilities are per pulse.
struct Coherent {
    double mu = 0.1;  // mean photon number |alpha|^2
};

// Two-mode squeezed vacuum, sqrt(1-p) sum_n p^(n/2) |n,n>.
struct SpdcPair {
    double p = 0.01;
};

// Two correlated two-mode squeezers with a fixed singlet-type phase across
// the h/v pairs of two spatial modes; multi-pair terms kept up to truncation.
struct PolarizationEntangledPair {
    double p = 0.01;
};

// SPDC signal conditioned on a herald detection on the idler arm.
struct HeraldedSps {
    double p = 0.01;
    DetectorModel herald_detector = DetectorModel(DetectorKind::threshold, 0.8, 0.0);
};

// Trigger source emitting a phase-randomized mixture
//   (1 - p1 - p2)|0><0| + p1|1><1| + p2|2><2|.
struct OnDemandSps {
    double p1 = 0.95;
    double p2 = 1e-4;
};

using SourceModel =
    std::variant<Coherent, SpdcPair, PolarizationEntangledPair, HeraldedSps, OnDemandSps>;

struct EmitResult {
    MixedState state;
    // Probability that the source announced success this pulse (1 unless the
    // variant is heralded).
    double herald_probability = 1.0;
    // Probability mass lost to the truncation before renormalizing.
    double leaked_mass = 0.0;
};

// Builds the source state on the given target modes:
//   Coherent                  1 mode
//   SpdcPair                  2 modes (signal, idler)
//   HeraldedSps               1 mode (the idler is heralded away internally)
//   PolarizationEntangledPair 2 base labels -> 4 polarization modes
//   OnDemandSps               1 mode
// States are renormalized after truncation; emit throws sim_error when the
// truncated mass exceeds 1e-3.
EmitResult emit(const SourceModel& source, const std::vector<ModeLabel>& modes,
                Truncation truncation);

// Second-order autocorrelation at zero delay, <n(n-1)>/<n>^2, of a
// single-mode state. Throws sim_error on (numerically) empty input.
double g2_zero(const MixedState& s, const ModeLabel& m);

// Maximum mass the truncated source state may lose before emit() refuses.
inline constexpr double kEmitLeakTolerance = 1e-3;

} // namespace qlink
