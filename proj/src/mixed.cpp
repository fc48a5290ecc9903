#include "qlink/mixed.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "qlink/errors.hpp"

namespace qlink {

DetectorModel::DetectorModel(DetectorKind k, double eta, double dark)
    : kind(k), efficiency(eta), dark_prob(dark) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("DetectorModel: efficiency out of [0,1]");
    if (dark < 0.0 || dark >= 1.0)
        throw std::invalid_argument("DetectorModel: dark probability out of [0,1)");
}

MixedState::MixedState(FockState pure_state) {
    branches_.push_back({1.0, std::move(pure_state)});
}

MixedState::MixedState(std::vector<Branch> branches) : branches_(std::move(branches)) {
    if (branches_.empty()) throw std::invalid_argument("MixedState: empty ensemble");
    for (const auto& b : branches_) {
        if (b.weight <= 0.0) throw std::invalid_argument("MixedState: non-positive weight");
        if (b.state.registry() != branches_.front().state.registry())
            throw std::invalid_argument("MixedState: branch registry mismatch");
    }
}

const std::vector<ModeLabel>& MixedState::registry() const {
    return branches_.front().state.registry();
}

int MixedState::n_max() const { return branches_.front().state.n_max(); }

double MixedState::trace() const {
    double t = 0.0;
    for (const auto& b : branches_) t += b.weight * b.state.norm_squared();
    return t;
}

void MixedState::normalize() {
    const double t = trace();
    if (t <= 0.0) throw sim_error("MixedState::normalize: zero trace");
    for (auto& b : branches_) b.weight /= t;
}

double MixedState::purity() const {
    // Tr rho^2 = sum_ij w_i w_j |<psi_i|psi_j>|^2 for normalized branches.
    double acc = 0.0;
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        for (std::size_t j = 0; j < branches_.size(); ++j) {
            const Complex ov = inner_product(branches_[i].state, branches_[j].state);
            acc += branches_[i].weight * branches_[j].weight * std::norm(ov);
        }
    }
    return acc;
}

double MixedState::mean_photon_number(const ModeLabel& m) const {
    double acc = 0.0;
    for (const auto& b : branches_) acc += b.weight * b.state.mean_photon_number(m);
    return acc;
}

double MixedState::mean_n_n_minus_1(const ModeLabel& m) const {
    double acc = 0.0;
    for (const auto& b : branches_) {
        const std::size_t k = b.state.mode_index(m);
        for (const auto& [occ, amp] : b.state.amplitudes()) {
            const double n = occ[k];
            acc += b.weight * n * (n - 1.0) * std::norm(amp);
        }
    }
    return acc;
}

void MixedState::prune_branches() {
    std::vector<Branch> kept;
    kept.reserve(branches_.size());
    for (auto& b : branches_) {
        const double mass = b.weight * b.state.norm_squared();
        if (mass < kBranchPrune)
            discarded_weight_ += mass;
        else
            kept.push_back(std::move(b));
    }
    if (kept.empty())
        throw sim_error("MixedState: all branches pruned");
    branches_ = std::move(kept);
}

MixedState tensor_product(const MixedState& a, const MixedState& b) {
    std::vector<MixedState::Branch> out;
    out.reserve(a.branches().size() * b.branches().size());
    for (const auto& ba : a.branches())
        for (const auto& bb : b.branches())
            out.push_back({ba.weight * bb.weight, tensor_product(ba.state, bb.state)});
    MixedState result(std::move(out));
    result.prune_branches();
    return result;
}

namespace {

// The per-branch overflow guard is suspended and the ensemble-weighted leak
// of the whole operation is bounded instead.
MixedState branchwise_unitary(const MixedState& s,
                              const std::function<FockState(const FockState&)>& op) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    (void)kInf;
    std::vector<MixedState::Branch> out;
    out.reserve(s.branches().size());
    double weighted_leak = 0.0;
    for (const auto& b : s.branches()) {
        FockState next = op(b.state);
        weighted_leak += b.weight * (next.leaked_mass() - b.state.leaked_mass());
        out.push_back({b.weight, std::move(next)});
    }
    if (weighted_leak > kTruncationLeakTolerance)
        throw sim_error("branchwise unitary: truncation overflow leaked " +
                        std::to_string(weighted_leak) + " ensemble mass; raise n_max");
    return MixedState(std::move(out));
}

} // namespace

MixedState apply_beamsplitter(const MixedState& s, const ModeLabel& m1, const ModeLabel& m2,
                              double transmissivity, double phase) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    return branchwise_unitary(s, [&](const FockState& psi) {
        return apply_beamsplitter(psi, m1, m2, transmissivity, phase, kInf);
    });
}

MixedState apply_pbs_rotated(const MixedState& s, const std::string& in1_base,
                             const std::string& in2_base) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    return branchwise_unitary(s, [&](const FockState& psi) {
        return apply_pbs_rotated(psi, in1_base, in2_base, kInf);
    });
}

MixedState apply_loss(const MixedState& s, const ModeLabel& m, double survival_eta) {
    if (survival_eta < 0.0 || survival_eta > 1.0)
        throw std::invalid_argument("apply_loss: survival probability out of [0,1]");
    if (survival_eta == 1.0) return s;

    std::vector<MixedState::Branch> out;
    for (const auto& b : s.branches()) {
        const std::size_t k = b.state.mode_index(m);
        int max_occ = 0;
        for (const auto& [occ, amp] : b.state.amplitudes()) {
            (void)amp;
            max_occ = std::max(max_occ, static_cast<int>(occ[k]));
        }
        // Kraus operator for losing exactly `lost` photons:
        //   K_lost |n> = sqrt(C(n,lost) eta^(n-lost) (1-eta)^lost) |n-lost>
        for (int lost = 0; lost <= max_occ; ++lost) {
            AmplitudeMap amps;
            for (const auto& [occ, amp] : b.state.amplitudes()) {
                const int n = occ[k];
                if (n < lost) continue;
                const double binom =
                    factorial(n) / (factorial(lost) * factorial(n - lost));
                const double coeff = std::sqrt(binom * std::pow(survival_eta, n - lost) *
                                               std::pow(1.0 - survival_eta, lost));
                if (coeff == 0.0) continue;
                Occupation nocc = occ;
                nocc[k] = static_cast<std::uint8_t>(n - lost);
                amps[std::move(nocc)] += amp * coeff;
            }
            if (amps.empty()) continue;
            FockState psi = FockState::from_amplitudes(b.state.registry(),
                                                       Truncation(b.state.n_max()),
                                                       std::move(amps),
                                                       b.state.amplitude_prune());
            const double w = b.weight * psi.norm_squared();
            if (w <= 0.0) continue;
            psi.normalize();
            out.push_back({w, std::move(psi)});
        }
    }
    MixedState result(std::move(out));
    result.prune_branches();
    return result;
}

namespace {

// Diagonal POVM weight of one detector outcome given n photons in the mode.
double outcome_weight(const DetectorModel& det, int n, int outcome, int n_max) {
    const double eta = det.efficiency;
    const double d = det.dark_prob;
    if (det.kind == DetectorKind::threshold) {
        const double no_click = (1.0 - d) * std::pow(1.0 - eta, n);
        if (outcome == 0) return no_click;
        if (outcome == 1) return 1.0 - no_click;
        throw std::invalid_argument("measure_povm: threshold outcome must be 0 or 1");
    }
    // Number resolving: binomial thinning, plus one extra dark count with
    // probability d. Valid outcomes are 0..n_max+1.
    if (outcome < 0 || outcome > n_max + 1)
        throw std::invalid_argument("measure_povm: counting outcome out of range");
    auto binom_det = [&](int k) -> double {
        if (k < 0 || k > n) return 0.0;
        const double c = factorial(n) / (factorial(k) * factorial(n - k));
        return c * std::pow(eta, k) * std::pow(1.0 - eta, n - k);
    };
    return (1.0 - d) * binom_det(outcome) + d * binom_det(outcome - 1);
}

} // namespace

MeasureResult measure_povm(const MixedState& s, const std::vector<ModeLabel>& modes,
                           const DetectorModel& detector, const std::vector<int>& outcome) {
    if (modes.size() != outcome.size())
        throw std::invalid_argument("measure_povm: outcome arity mismatch");
    std::vector<std::size_t> idx(modes.size());
    for (std::size_t j = 0; j < modes.size(); ++j)
        idx[j] = s.branches().front().state.mode_index(modes[j]);

    const int n_max = s.n_max();
    double probability = 0.0;
    std::vector<MixedState::Branch> conditional;
    for (const auto& b : s.branches()) {
        AmplitudeMap amps;
        double branch_prob = 0.0;
        for (const auto& [occ, amp] : b.state.amplitudes()) {
            double w = 1.0;
            for (std::size_t j = 0; j < modes.size(); ++j)
                w *= outcome_weight(detector, occ[idx[j]], outcome[j], n_max);
            if (w <= 0.0) continue;
            branch_prob += w * std::norm(amp);
            amps[occ] = amp * std::sqrt(w);
        }
        probability += b.weight * branch_prob;
        if (!amps.empty()) {
            FockState psi = FockState::from_amplitudes(b.state.registry(),
                                                       Truncation(b.state.n_max()),
                                                       std::move(amps),
                                                       b.state.amplitude_prune());
            const double w = b.weight * psi.norm_squared();
            if (w > 0.0) {
                psi.normalize();
                conditional.push_back({w, std::move(psi)});
            }
        }
    }

    MeasureResult res;
    res.probability = probability;
    if (probability <= 1e-300 || conditional.empty()) return res;  // flagged: no state
    for (auto& b : conditional) b.weight /= probability;
    MixedState cond(std::move(conditional));
    cond.prune_branches();
    res.state = std::move(cond);
    return res;
}

MixedState partial_trace(const MixedState& s, const std::vector<ModeLabel>& discard) {
    if (discard.empty()) return s;
    std::vector<std::size_t> didx;
    for (const auto& m : discard) didx.push_back(s.branches().front().state.mode_index(m));
    std::sort(didx.begin(), didx.end());
    if (std::adjacent_find(didx.begin(), didx.end()) != didx.end())
        throw std::invalid_argument("partial_trace: repeated mode");
    if (didx.size() >= s.registry().size())
        throw std::invalid_argument("partial_trace: cannot discard every mode");

    std::vector<ModeLabel> kept_labels;
    std::vector<std::size_t> kidx;
    for (std::size_t i = 0; i < s.registry().size(); ++i) {
        if (!std::binary_search(didx.begin(), didx.end(), i)) {
            kept_labels.push_back(s.registry()[i]);
            kidx.push_back(i);
        }
    }

    std::vector<MixedState::Branch> out;
    for (const auto& b : s.branches()) {
        // Group amplitudes by the discarded occupation pattern; each group is
        // an (unnormalized) pure branch on the kept modes.
        std::map<Occupation, AmplitudeMap> groups;
        for (const auto& [occ, amp] : b.state.amplitudes()) {
            Occupation dkey(didx.size());
            for (std::size_t j = 0; j < didx.size(); ++j) dkey[j] = occ[didx[j]];
            Occupation kocc(kidx.size());
            for (std::size_t j = 0; j < kidx.size(); ++j) kocc[j] = occ[kidx[j]];
            groups[std::move(dkey)][std::move(kocc)] += amp;
        }
        for (auto& [dkey, amps] : groups) {
            (void)dkey;
            FockState psi = FockState::from_amplitudes(kept_labels, Truncation(b.state.n_max()),
                                                       std::move(amps),
                                                       b.state.amplitude_prune());
            const double w = b.weight * psi.norm_squared();
            if (w <= 0.0) continue;
            psi.normalize();
            out.push_back({w, std::move(psi)});
        }
    }
    MixedState result(std::move(out));
    result.prune_branches();
    return result;
}

double fidelity(const MixedState& s, const FockState& target) {
    if (s.registry() != target.registry())
        throw std::invalid_argument("fidelity: registry mismatch");
    double acc = 0.0;
    for (const auto& b : s.branches())
        acc += b.weight * std::norm(inner_product(target, b.state));
    return acc;
}

TwoQubitState extract_two_qubit_state(const MixedState& s, const std::string& side_a_base,
                                      const std::string& side_b_base) {
    const std::vector<ModeLabel> qubit_modes = {mode_h(side_a_base), mode_v(side_a_base),
                                                mode_h(side_b_base), mode_v(side_b_base)};
    for (const auto& m : qubit_modes)
        if (!s.branches().front().state.has_mode(m))
            throw std::invalid_argument("extract_two_qubit_state: missing mode '" + m.str() + "'");

    // Reduce to the four dual-rail modes first.
    std::vector<ModeLabel> others;
    for (const auto& m : s.registry())
        if (std::find(qubit_modes.begin(), qubit_modes.end(), m) == qubit_modes.end())
            others.push_back(m);
    const MixedState reduced = others.empty() ? s : partial_trace(s, others);

    std::array<std::size_t, 4> idx{};
    for (std::size_t j = 0; j < 4; ++j)
        idx[j] = reduced.branches().front().state.mode_index(qubit_modes[j]);

    // Qubit basis {hh, hv, vh, vv}: (a_h,a_v,b_h,b_v) occupations
    // (1,0,1,0), (1,0,0,1), (0,1,1,0), (0,1,0,1).
    const std::array<std::array<std::uint8_t, 4>, 4> basis = {{
        {1, 0, 1, 0}, {1, 0, 0, 1}, {0, 1, 1, 0}, {0, 1, 0, 1}}};

    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    double subspace_mass = 0.0;
    for (const auto& b : reduced.branches()) {
        Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
        for (const auto& [occ, amp] : b.state.amplitudes()) {
            for (std::size_t q = 0; q < 4; ++q) {
                bool match = true;
                for (std::size_t j = 0; j < 4; ++j)
                    if (occ[idx[j]] != basis[q][j]) { match = false; break; }
                if (match) { v(static_cast<int>(q)) = amp; break; }
            }
        }
        const double m = b.weight * v.squaredNorm();
        if (m > 0.0) {
            rho += b.weight * (v * v.adjoint());
            subspace_mass += m;
        }
    }
    if (subspace_mass < 1e-12)
        throw sim_error("extract_two_qubit_state: dual-rail subspace probability below 1e-12");
    rho /= subspace_mass;
    // Clean numerical asymmetry before constructing the validated state.
    const Eigen::Matrix4cd herm = 0.5 * (rho + rho.adjoint());
    return TwoQubitState(herm, subspace_mass);
}

} // namespace qlink
