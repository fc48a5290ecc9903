#pragma once

#include <Eigen/Dense>

namespace qlink {

// Dual-rail two-qubit state extracted from the single-photon-per-side
// subspace. Basis order {hh, hv, vh, vv}; subspace_probability is the mass of
// that subspace in the parent state.
struct TwoQubitState {
    Eigen::Matrix4cd matrix = Eigen::Matrix4cd::Zero();
    double subspace_probability = 0.0;

    TwoQubitState() = default;
    TwoQubitState(const Eigen::Matrix4cd& m, double subspace_prob);

    // Throws std::invalid_argument when not Hermitian / unit trace / PSD
    // within the documented tolerances.
    void validate() const;

    // Pauli correlation matrix T_ij = tr(rho sigma_i x sigma_j), i,j in {x,y,z},
    // and the one-sided Bloch vectors.
    Eigen::Matrix3d correlation_matrix() const;
    Eigen::Vector3d bloch_a() const;
    Eigen::Vector3d bloch_b() const;

    static TwoQubitState pure(const Eigen::Vector4cd& psi, double subspace_prob = 1.0);
    static TwoQubitState singlet();                        // (|hv> - |vh>)/sqrt(2)
    static TwoQubitState werner(double visibility);        // v*singlet + (1-v)*I/4
    static TwoQubitState maximally_mixed();
};

// Largest overlap with any maximally entangled two-qubit state (the fully
// entangled fraction), computed in the magic basis.
double fully_entangled_fraction(const TwoQubitState& s);

// <psi|rho|psi> against an explicit pure target.
double overlap(const TwoQubitState& s, const Eigen::Vector4cd& psi);

} // namespace qlink
