#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qlink {

enum class Pol : std::uint8_t { none, h, v };

// Label of one optical mode. Polarization-paired modes ("a_h"/"a_v") share a
// base name so circuit code can address the pair at once.
struct ModeLabel {
    std::string base;
    Pol pol = Pol::none;

    ModeLabel() = default;
    ModeLabel(std::string b, Pol p = Pol::none) : base(std::move(b)), pol(p) {}

    std::string str() const;
    auto operator<=>(const ModeLabel&) const = default;
};

inline ModeLabel mode_h(const std::string& base) { return {base, Pol::h}; }
inline ModeLabel mode_v(const std::string& base) { return {base, Pol::v}; }

// Per-mode photon number cutoff of the simulation basis.
struct Truncation {
    int n_max = 2;

    explicit Truncation(int n = 2);
};

using Occupation = std::vector<std::uint8_t>;
using Complex = std::complex<double>;
using AmplitudeMap = std::map<Occupation, Complex>;

// Default magnitude below which stored amplitudes are dropped. Dropped mass is
// tracked, and a unit test checks that halving the threshold moves reported
// probabilities by < 1e-9.
inline constexpr double kDefaultAmplitudePrune = 1e-14;

// Unitary ops may push population past n_max; if the dropped mass of one
// operation exceeds this, the state is considered unusable and we throw
// instead of silently renormalizing.
inline constexpr double kTruncationLeakTolerance = 1e-6;

// Pure multimode state in the truncated photon-number basis, stored as a
// sparse amplitude map keyed by occupation tuples (one entry per mode, in
// registry order).
class FockState {
public:
    // Vacuum over the given registry.
    FockState(std::vector<ModeLabel> registry, Truncation truncation,
              double amplitude_prune = kDefaultAmplitudePrune);

    static FockState basis(std::vector<ModeLabel> registry, Truncation truncation,
                           const Occupation& occ);
    static FockState from_amplitudes(std::vector<ModeLabel> registry, Truncation truncation,
                                     AmplitudeMap amps,
                                     double amplitude_prune = kDefaultAmplitudePrune);

    const std::vector<ModeLabel>& registry() const { return registry_; }
    int n_max() const { return n_max_; }
    double amplitude_prune() const { return amp_prune_; }
    const AmplitudeMap& amplitudes() const { return amps_; }

    std::size_t mode_count() const { return registry_.size(); }
    bool has_mode(const ModeLabel& m) const;
    std::size_t mode_index(const ModeLabel& m) const;  // throws if absent

    Complex amplitude(const Occupation& occ) const;
    double norm_squared() const;
    void normalize();  // throws sim_error on zero norm

    // Probability mass dropped so far by truncation overflow / pruning,
    // accumulated across the operations that produced this state.
    double leaked_mass() const { return leaked_mass_; }
    double pruned_mass() const { return pruned_mass_; }

    // Mean photon number of one mode.
    double mean_photon_number(const ModeLabel& m) const;

    friend FockState tensor_product(const FockState& a, const FockState& b);
    friend FockState apply_mode_unitary(const FockState& s, const std::vector<ModeLabel>& modes,
                                        const Eigen::MatrixXcd& u,
                                        const std::vector<ModeLabel>* renamed,
                                        double leak_tolerance);
    friend class MixedState;

private:
    std::vector<ModeLabel> registry_;
    int n_max_ = 2;
    double amp_prune_ = kDefaultAmplitudePrune;
    AmplitudeMap amps_;
    double leaked_mass_ = 0.0;
    double pruned_mass_ = 0.0;

    void drop_small_amplitudes();
};

Complex inner_product(const FockState& a, const FockState& b);  // <a|b>

// Combined state on the concatenated registries. Throws on label collision.
FockState tensor_product(const FockState& a, const FockState& b);

// Rewrites the creation operators of the listed modes,
//   a_j^dag -> sum_i u(i,j) a_i^dag,
// so single-photon amplitude vectors transform as c' = u c. `u` must be
// unitary over the listed modes. If `renamed` is given the affected modes take
// those labels in the output registry. Overflow population beyond n_max is
// dropped and accounted in leaked_mass(); more than `leak_tolerance` of it
// throws sim_error. Ensemble wrappers pass +inf here and bound the
// weight-averaged leak instead.
FockState apply_mode_unitary(const FockState& s, const std::vector<ModeLabel>& modes,
                             const Eigen::MatrixXcd& u,
                             const std::vector<ModeLabel>* renamed = nullptr,
                             double leak_tolerance = kTruncationLeakTolerance);

// Two-mode beamsplitter. Convention used throughout:
//   U = [  sqrt(T)              sqrt(1-T) e^{+i phi} ]
//       [ -sqrt(1-T) e^{-i phi} sqrt(T)              ]
// acting on single-photon amplitudes of (m1, m2); a photon in m1 scatters to
//   sqrt(T)|1,0> - sqrt(1-T) e^{-i phi}|0,1>.
FockState apply_beamsplitter(const FockState& s, const ModeLabel& m1, const ModeLabel& m2,
                             double transmissivity, double phase = 0.0,
                             double leak_tolerance = kTruncationLeakTolerance);

// Polarization beamsplitter in the +/-45 degree basis followed by h|v
// measurement ports. Inputs are the h/v pairs of base modes `in1` (= b) and
// `in2` (= c); the four output ports satisfy
//   D+-  = (c_h + c_v +- in1_h -+ in1_v)/2
//   D~+- = (+-c_h -+ c_v + in1_h + in1_v)/2
// and are labeled D_plus, D_minus, Dt_plus, Dt_minus.
FockState apply_pbs_rotated(const FockState& s, const std::string& in1_base,
                            const std::string& in2_base,
                            double leak_tolerance = kTruncationLeakTolerance);

inline const char* kPbsOutPlus = "D_plus";
inline const char* kPbsOutMinus = "D_minus";
inline const char* kPbsOutTildePlus = "Dt_plus";
inline const char* kPbsOutTildeMinus = "Dt_minus";

// The 4x4 port matrix of apply_pbs_rotated, rows (D+, D-, D~+, D~-),
// columns (in1_h, in1_v, in2_h, in2_v). Exposed so tests can check unitarity.
Eigen::Matrix4cd pbs_rotated_matrix();

double factorial(int n);

} // namespace qlink
