#pragma once

#include <optional>
#include <vector>

#include "qlink/fock.hpp"
#include "qlink/two_qubit.hpp"

namespace qlink {

enum class DetectorKind { threshold, number_resolving };

struct DetectorModel {
    DetectorKind kind = DetectorKind::threshold;
    double efficiency = 0.8;
    double dark_prob = 0.0;

    DetectorModel() = default;
    DetectorModel(DetectorKind k, double eta, double dark = 0.0);

    static DetectorModel ideal_threshold() { return {DetectorKind::threshold, 1.0, 0.0}; }
    static DetectorModel ideal_number_resolving() {
        return {DetectorKind::number_resolving, 1.0, 0.0};
    }
};

// rho = sum_i w_i |psi_i><psi_i| as an explicit pure-state ensemble. Branches
// are not necessarily orthogonal. Kept sparse on purpose: the herald circuit
// has 8 polarization modes and dense operators at n_max=2 would be ~6561^2
// entries.
class MixedState {
public:
    struct Branch {
        double weight;
        FockState state;
    };

    // Weight below which ensemble branches are dropped (dropped mass is
    // tracked in discarded_weight()).
    static constexpr double kBranchPrune = 1e-12;

    explicit MixedState(FockState pure_state);
    MixedState(std::vector<Branch> branches);  // weights > 0, normalized by caller

    const std::vector<Branch>& branches() const { return branches_; }
    const std::vector<ModeLabel>& registry() const;
    int n_max() const;

    double trace() const;  // sum of weights
    void normalize();      // rescale weights to sum 1; throws sim_error on zero
    double purity() const; // Tr rho^2
    double discarded_weight() const { return discarded_weight_; }

    // Diagonal photon-number moments of one mode.
    double mean_photon_number(const ModeLabel& m) const;
    double mean_n_n_minus_1(const ModeLabel& m) const;

    void prune_branches();

private:
    std::vector<Branch> branches_;
    double discarded_weight_ = 0.0;
};

// Branch-wise product of two ensembles on disjoint registries.
MixedState tensor_product(const MixedState& a, const MixedState& b);

// Branch-wise unitary wrappers (weights unchanged).
MixedState apply_beamsplitter(const MixedState& s, const ModeLabel& m1, const ModeLabel& m2,
                              double transmissivity, double phase = 0.0);
MixedState apply_pbs_rotated(const MixedState& s, const std::string& in1_base,
                             const std::string& in2_base);

// Pure-loss channel on one mode: Kraus branching of an eta-transmissivity
// coupling to an unmonitored environment. Trace preserving.
MixedState apply_loss(const MixedState& s, const ModeLabel& m, double survival_eta);

struct MeasureResult {
    double probability = 0.0;
    // Absent when the outcome has (numerically) zero probability.
    std::optional<MixedState> state;
};

// POVM measurement on the listed modes. For threshold detectors outcome[k] is
// 0 (no click) or 1 (click) with elements
//   Pi_0 = (1-d) sum_n (1-eta)^n |n><n|,   Pi_1 = 1 - Pi_0.
// For number-resolving detectors outcome[k] is the detected count with
// binomial efficiency; a dark count shifts the detected count up by one with
// probability d, so valid outcomes run 0..n_max+1. The conditional state is
// produced with the sqrt-POVM Kraus operator and renormalized; measured modes
// remain in the registry (partial_trace them to discard).
MeasureResult measure_povm(const MixedState& s, const std::vector<ModeLabel>& modes,
                           const DetectorModel& detector, const std::vector<int>& outcome);

// Reduced state after discarding the given modes.
MixedState partial_trace(const MixedState& s, const std::vector<ModeLabel>& discard);

// <target|rho|target>. Registries must match.
double fidelity(const MixedState& s, const FockState& target);

// Projects onto the exactly-one-photon-per-side dual-rail subspace of the
// polarization pairs sideA/sideB (any other modes are traced out first) and
// returns the renormalized 4x4 matrix together with the subspace mass.
// Throws sim_error when the subspace mass is below 1e-12.
TwoQubitState extract_two_qubit_state(const MixedState& s, const std::string& side_a_base,
                                      const std::string& side_b_base);

} // namespace qlink
