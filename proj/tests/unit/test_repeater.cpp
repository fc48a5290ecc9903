#include <doctest.h>

#include <cmath>

#include "qlink/errors.hpp"
#include "qlink/repeater.hpp"
#include "qlink/wcp.hpp"

using namespace qlink;

namespace {

RepeaterConfig reference_config() {
    RepeaterConfig c;
    c.total_length_km = 1000.0;
    c.link_count = 16;
    c.detector_eff = 0.9;
    c.memory_eff = 0.9;
    c.fidelity_target = 0.9;
    return c;
}

} // namespace

TEST_CASE("pair-probability budget is quadratic in the link count") {
    CHECK(max_allowed_pair_prob(16, 0.9) == doctest::Approx(0.1 / 256.0).epsilon(1e-12));
    CHECK(max_allowed_pair_prob(8, 0.9) / max_allowed_pair_prob(16, 0.9) ==
          doctest::Approx(4.0).epsilon(1e-12));
    for (int n : {1, 2, 4, 8, 32})
        CHECK(max_allowed_pair_prob(n, 0.9) * n * n == doctest::Approx(0.1).epsilon(1e-12));
    CHECK_THROWS_AS((void)max_allowed_pair_prob(16, 1.0), std::invalid_argument);
}

TEST_CASE("link success probability reference points") {
    RepeaterConfig c = reference_config();
    SUBCASE("lossless ideal hardware") {
        c.attenuation_db_per_km = 0.0;
        c.detector_eff = 1.0;
        CHECK(link_success_probability(DlczLink{0.01}, c) == doctest::Approx(0.02).epsilon(1e-12));
    }
    SUBCASE("zero emission gives zero success") {
        CHECK(link_success_probability(DlczLink{0.0}, c) == doctest::Approx(0.0));
        CHECK(link_success_probability(SpsLink{0.0, 0.0, 0.5}, c) == doctest::Approx(0.0));
    }
    SUBCASE("halving the link length divides the attenuation exponent by two") {
        RepeaterConfig shorter = c;
        shorter.link_count = 2 * c.link_count;  // halves L0 at fixed total length
        const double ratio = link_success_probability(DlczLink{0.01}, shorter) /
                             link_success_probability(DlczLink{0.01}, c);
        const double expected =
            std::pow(10.0, c.attenuation_db_per_km * c.link_length_km() / 20.0);
        CHECK(ratio == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("chain waiting time recursion") {
    RepeaterConfig c = reference_config();
    c.link_count = 1;
    const double p0 = 0.5;
    CHECK(chain_waiting_time(p0, c, {}) ==
          doctest::Approx((c.link_length_km() / c.fiber_speed_km_s) / p0).epsilon(1e-12));

    c.link_count = 2;
    CHECK(chain_waiting_time(p0, c, {1.0}) ==
          doctest::Approx(1.5 * (c.link_length_km() / c.fiber_speed_km_s) / p0).epsilon(1e-12));

    CHECK_THROWS_AS((void)chain_waiting_time(0.0, c, {1.0}), sim_error);
    CHECK_THROWS_AS((void)chain_waiting_time(0.5, c, {0.0}), sim_error);
}

TEST_CASE("chain waiting time is homogeneous in the success probabilities") {
    for (int n : {2, 4}) {
        RepeaterConfig c = reference_config();
        c.link_count = n;
        const std::vector<double> swaps(static_cast<std::size_t>(c.nesting_levels()), 0.4);
        const double t1 = chain_waiting_time(0.2, c, swaps);
        std::vector<double> scaled = swaps;
        for (auto& s : scaled) s *= 2.0;
        const double t2 = chain_waiting_time(0.4, c, scaled);
        const double levels = c.nesting_levels();
        CHECK(t1 / t2 == doctest::Approx(std::pow(2.0, levels + 1.0)).epsilon(1e-10));
    }
}

TEST_CASE("repeater rate beats direct transmission at 1000 km") {
    const RepeaterPoint pt = repeater_rate(DlczLink{}, reference_config());
    CHECK(pt.rate_hz > 0.0);
    CHECK(pt.fidelity == doctest::Approx(0.9).epsilon(1e-12));
    const DirectTransmission direct = direct_transmission_rate(1e10, {1000.0, 0.2});
    CHECK(direct.states_per_s == doctest::Approx(1e-10).epsilon(1e-6));
    CHECK(pt.rate_hz > direct.states_per_s);
}

TEST_CASE("single-link chain reduces to the bare link rate") {
    RepeaterConfig c = reference_config();
    c.link_count = 1;
    const RepeaterPoint pt = repeater_rate(DlczLink{0.05}, c);
    const double p0 = link_success_probability(DlczLink{0.05}, c);
    CHECK(pt.rate_hz ==
          doctest::Approx(p0 / (c.link_length_km() / c.fiber_speed_km_s)).epsilon(1e-12));
}

TEST_CASE("emission probability above the budget is rejected") {
    RepeaterConfig c = reference_config();
    CHECK_THROWS_AS((void)repeater_rate(DlczLink{0.01}, c), sim_error);  // budget is 3.9e-4
}

TEST_CASE("unreachable SPS fidelity target is infeasible") {
    RepeaterConfig c = reference_config();
    // two-photon error 256 * p2 / p1 must stay below 1 - F = 0.1
    CHECK_THROWS_AS((void)repeater_rate(SpsLink{0.5, 5e-3, -1.0}, c), sim_error);
}

TEST_CASE("repeater rate decreases with distance") {
    RepeaterConfig c = reference_config();
    double last = 1e300;
    for (double l : {400.0, 600.0, 800.0, 1000.0, 1200.0}) {
        c.total_length_km = l;
        const double r = repeater_rate(DlczLink{}, c).rate_hz;
        CHECK(r < last);
        CHECK(r > 0.0);
        last = r;
    }
}

TEST_CASE("repeater log-slope is the per-link attenuation; direct is N times steeper") {
    RepeaterConfig c = reference_config();
    c.link_count = 8;
    // Fit log10(rate * L) against L to isolate the attenuation exponent from
    // the linear communication-time factor.
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (double l = 200.0; l <= 1000.0; l += 100.0) {
        c.total_length_km = l;
        const double y = std::log10(repeater_rate(DlczLink{}, c).rate_hz * l);
        sx += l; sy += y; sxx += l * l; sxy += l * y; n += 1;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double expected = -c.attenuation_db_per_km / (10.0 * c.link_count);
    CHECK(slope == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("architecture comparison at the reference point") {
    const RepeaterConfig c = reference_config();
    const auto rows = compare_architectures(c, {0.95}, 1e-4);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].ratio > 5.0);
    CHECK(rows[0].ratio < 50.0);

    // ratio grows monotonically with the source efficiency
    const auto sweep = compare_architectures(c, {0.5, 0.6, 0.7, 0.8, 0.9, 0.99}, 1e-4);
    for (std::size_t i = 1; i < sweep.size(); ++i) CHECK(sweep[i].ratio > sweep[i - 1].ratio);

    const double crossover = sps_crossover_efficiency(c, 1e-4);
    CHECK(crossover > 0.55);
    CHECK(crossover < 0.80);
    const auto at = compare_architectures(c, {crossover}, 1e-4);
    CHECK(at[0].ratio == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("config validation") {
    RepeaterConfig c = reference_config();
    c.link_count = 12;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = reference_config();
    c.fidelity_target = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
