#include "qlink/two_qubit.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace qlink {

namespace {

Eigen::Matrix2cd pauli(int i) {
    Eigen::Matrix2cd m;
    const std::complex<double> I{0.0, 1.0};
    switch (i) {
        case 0: m << 0, 1, 1, 0; break;           // x
        case 1: m << 0, -I, I, 0; break;          // y
        case 2: m << 1, 0, 0, -1; break;          // z
        default: m.setIdentity(); break;
    }
    return m;
}

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

} // namespace

TwoQubitState::TwoQubitState(const Eigen::Matrix4cd& m, double subspace_prob)
    : matrix(m), subspace_probability(subspace_prob) {
    validate();
}

void TwoQubitState::validate() const {
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("TwoQubitState: matrix not Hermitian");
    if (std::abs(matrix.trace().real() - 1.0) > 1e-10 || std::abs(matrix.trace().imag()) > 1e-10)
        throw std::invalid_argument("TwoQubitState: trace != 1");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(matrix, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9)
        throw std::invalid_argument("TwoQubitState: negative eigenvalue");
    if (subspace_probability < 0.0 || subspace_probability > 1.0 + 1e-12)
        throw std::invalid_argument("TwoQubitState: subspace probability out of range");
}

Eigen::Matrix3d TwoQubitState::correlation_matrix() const {
    Eigen::Matrix3d t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            t(i, j) = (matrix * kron2(pauli(i), pauli(j))).trace().real();
    return t;
}

Eigen::Vector3d TwoQubitState::bloch_a() const {
    Eigen::Vector3d r;
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    for (int i = 0; i < 3; ++i) r(i) = (matrix * kron2(pauli(i), id)).trace().real();
    return r;
}

Eigen::Vector3d TwoQubitState::bloch_b() const {
    Eigen::Vector3d r;
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    for (int j = 0; j < 3; ++j) r(j) = (matrix * kron2(id, pauli(j))).trace().real();
    return r;
}

TwoQubitState TwoQubitState::pure(const Eigen::Vector4cd& psi, double subspace_prob) {
    const double n = psi.norm();
    if (n <= 0.0) throw std::invalid_argument("TwoQubitState::pure: zero vector");
    const Eigen::Vector4cd v = psi / n;
    return TwoQubitState(v * v.adjoint(), subspace_prob);
}

TwoQubitState TwoQubitState::singlet() {
    Eigen::Vector4cd psi;
    psi << 0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0;
    return pure(psi);
}

TwoQubitState TwoQubitState::werner(double visibility) {
    if (visibility < 0.0 || visibility > 1.0)
        throw std::invalid_argument("werner: visibility out of [0,1]");
    const Eigen::Matrix4cd m = visibility * singlet().matrix +
                               (1.0 - visibility) * Eigen::Matrix4cd::Identity() / 4.0;
    return TwoQubitState(m, 1.0);
}

TwoQubitState TwoQubitState::maximally_mixed() {
    return TwoQubitState(Eigen::Matrix4cd::Identity() / 4.0, 1.0);
}

double fully_entangled_fraction(const TwoQubitState& s) {
    // Magic basis (basis order hh, hv, vh, vv): maximally entangled states are
    // exactly the real unit combinations of these four vectors, so the maximal
    // overlap is the top eigenvalue of Re(rho) expressed in this basis.
    const std::complex<double> I{0.0, 1.0};
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix4cd mb;  // columns are the magic-basis vectors
    mb.col(0) << r, 0, 0, r;
    mb.col(1) << I * r, 0, 0, -I * r;
    mb.col(2) << 0, I * r, I * r, 0;
    mb.col(3) << 0, r, -r, 0;
    const Eigen::Matrix4cd rho_mb = mb.adjoint() * s.matrix * mb;
    const Eigen::Matrix4d re = rho_mb.real();
    const Eigen::Matrix4d sym = 0.5 * (re + re.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double overlap(const TwoQubitState& s, const Eigen::Vector4cd& psi) {
    const Eigen::Vector4cd v = psi.normalized();
    return (v.adjoint() * s.matrix * v)(0, 0).real();
}

} // namespace qlink
