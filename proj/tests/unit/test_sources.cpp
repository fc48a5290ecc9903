#include <doctest.h>

#include <cmath>

#include "qlink/errors.hpp"
#include "qlink/sources.hpp"

using namespace qlink;

namespace {

const ModeLabel kA("a");

double prob_n_at_least(const MixedState& s, const ModeLabel& m, int threshold) {
    const std::size_t k = s.branches().front().state.mode_index(m);
    double p = 0.0;
    for (const auto& b : s.branches())
        for (const auto& [occ, amp] : b.state.amplitudes())
            if (occ[k] >= threshold) p += b.weight * std::norm(amp);
    return p;
}

} // namespace

TEST_CASE("ideal on-demand source emits exactly one photon") {
    const EmitResult r = emit(OnDemandSps{1.0, 0.0}, {kA}, Truncation(2));
    CHECK(r.state.trace() == doctest::Approx(1.0));
    CHECK(prob_n_at_least(r.state, kA, 1) == doctest::Approx(1.0));
    CHECK(prob_n_at_least(r.state, kA, 2) == doctest::Approx(0.0));
}

TEST_CASE("on-demand mixture carries the configured weights") {
    const EmitResult r = emit(OnDemandSps{0.9, 1e-3}, {kA}, Truncation(2));
    CHECK(r.state.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(prob_n_at_least(r.state, kA, 2) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(prob_n_at_least(r.state, kA, 1) == doctest::Approx(0.9 + 1e-3).epsilon(1e-12));
}

TEST_CASE("on-demand source validates its probabilities") {
    CHECK_THROWS_AS((void)emit(OnDemandSps{0.5, 0.6}, {kA}, Truncation(2)),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)emit(OnDemandSps{0.7, 0.4}, {kA}, Truncation(2)),
                    std::invalid_argument);
}

TEST_CASE("weak coherent pulse multi-photon mass near 0.5 percent at mu=0.1") {
    const EmitResult r = emit(Coherent{0.1}, {kA}, Truncation(6));
    CHECK(prob_n_at_least(r.state, kA, 2) == doctest::Approx(0.00467884).epsilon(2e-5));
    CHECK(r.state.trace() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.leaked_mass < 1e-9);
}

TEST_CASE("coherent emission refuses an undersized truncation") {
    CHECK_THROWS_AS((void)emit(Coherent{2.0}, {kA}, Truncation(1)), sim_error);
}

TEST_CASE("pair source mean photon number follows the geometric series") {
    const double p = 0.01;
    const EmitResult r = emit(SpdcPair{p}, {ModeLabel("s"), ModeLabel("i")}, Truncation(3));
    CHECK(r.state.mean_photon_number(ModeLabel("s")) ==
          doctest::Approx(p / (1.0 - p)).epsilon(1e-5));
    CHECK(r.state.mean_photon_number(ModeLabel("i")) ==
          doctest::Approx(p / (1.0 - p)).epsilon(1e-5));
}

TEST_CASE("g2 of reference states") {
    const EmitResult one = emit(OnDemandSps{1.0, 0.0}, {kA}, Truncation(2));
    CHECK(g2_zero(one.state, kA) == doctest::Approx(0.0));

    for (double mu : {0.05, 0.3, 1.0}) {
        const EmitResult coh = emit(Coherent{mu}, {kA}, Truncation(16));
        CHECK(g2_zero(coh.state, kA) == doctest::Approx(1.0).epsilon(1e-9));
    }

    // direct moment computation: <n(n-1)> = 2 p2, <n> = p1 + 2 p2
    const double p1 = 0.95, p2 = 1e-4;
    const EmitResult od = emit(OnDemandSps{p1, p2}, {kA}, Truncation(2));
    const double expected = 2.0 * p2 / std::pow(p1 + 2.0 * p2, 2.0);
    CHECK(g2_zero(od.state, kA) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(expected == doctest::Approx(2.2e-4).epsilon(0.01));

    const FockState vac = FockState({kA}, Truncation(2));
    CHECK_THROWS_AS((void)g2_zero(MixedState(vac), kA), sim_error);
}

TEST_CASE("heralded source with an ideal counting herald gives pure single photons") {
    double last = 1.0;
    for (double p : {0.1, 0.05, 0.01}) {
        const EmitResult r =
            emit(HeraldedSps{p, DetectorModel::ideal_number_resolving()}, {kA}, Truncation(4));
        const double g2 = g2_zero(r.state, kA);
        CHECK(g2 < 1e-10);  // exact idler correlation pins the signal to |1>
        CHECK(g2 <= last + 1e-12);
        last = g2;
        CHECK(r.herald_probability > 0.0);
    }
}

TEST_CASE("threshold-heralded source g2 grows with p and vanishes as p -> 0") {
    const DetectorModel herald(DetectorKind::threshold, 0.8, 0.0);
    double last = 1.0;
    for (double p : {0.1, 0.05, 0.01}) {
        const EmitResult r = emit(HeraldedSps{p, herald}, {kA}, Truncation(4));
        const double g2 = g2_zero(r.state, kA);
        CHECK(g2 > 0.0);
        CHECK(g2 < last);
        last = g2;
        // click probability is p eta to first order
        CHECK(r.herald_probability == doctest::Approx(p * 0.8).epsilon(0.2));
    }
}

TEST_CASE("polarization pair source heralds the singlet in the dual-rail subspace") {
    const double p = 1e-4;
    const EmitResult r =
        emit(PolarizationEntangledPair{p}, {ModeLabel("a"), ModeLabel("b")}, Truncation(2));
    CHECK(r.state.trace() == doctest::Approx(1.0).epsilon(1e-10));

    const TwoQubitState q = extract_two_qubit_state(r.state, "a", "b");
    CHECK(fully_entangled_fraction(q) == doctest::Approx(1.0).epsilon(1e-6));
    Eigen::Vector4cd singlet;
    singlet << 0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0;
    CHECK(overlap(q, singlet) == doctest::Approx(1.0).epsilon(1e-6));
    // one-pair mass 2p(1-p)^2; everything else sits outside the dual rail
    CHECK(q.subspace_probability ==
          doctest::Approx(2.0 * p * (1.0 - p) * (1.0 - p)).epsilon(1e-6));
}

TEST_CASE("emit validates the mode arity") {
    CHECK_THROWS_AS((void)emit(Coherent{0.1}, {kA, ModeLabel("b")}, Truncation(2)),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)emit(SpdcPair{0.1}, {kA}, Truncation(2)), std::invalid_argument);
    CHECK_THROWS_AS(
        (void)emit(PolarizationEntangledPair{0.1}, {mode_h("a"), ModeLabel("b")}, Truncation(2)),
        std::invalid_argument);
}
