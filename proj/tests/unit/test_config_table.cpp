#include <doctest.h>

#include <sstream>

#include "qlink/config.hpp"
#include "qlink/errors.hpp"
#include "qlink/scenario.hpp"
#include "qlink/table.hpp"

using namespace qlink;

TEST_CASE("number formatting rules") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(0.794) == "0.794");
    CHECK(format_number(12345.678) == "12345.678");
    CHECK(format_number(1e-4) == "1.000000000e-04");
    CHECK(format_number(-2.5e7) == "-2.500000000e+07");
    CHECK(format_number(999999.0) == "999999");
    CHECK(format_number(1000000.0) == "1.000000000e+06");
}

TEST_CASE("minimal herald config picks up the reference defaults") {
    const ScenarioConfig c = parse_config(Scenario::herald, "");
    CHECK(c.channel.attenuation_db_per_km == doctest::Approx(0.2));
    CHECK(c.detector.efficiency == doctest::Approx(0.8));
    CHECK(c.coupling == doctest::Approx(0.9));
    CHECK(c.repetition_rate_hz == doctest::Approx(1e10));
}

TEST_CASE("config parsing is strict") {
    SUBCASE("unknown key names the key and line") {
        try {
            parse_config(Scenario::herald, "[herald]\nnot_a_key = 1\n");
            FAIL("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find("herald.not_a_key") != std::string::npos);
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("range violation names the key") {
        try {
            parse_config(Scenario::wcp_rate, "[channel]\nattenuation_db_per_km = -1\n");
            FAIL("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find("channel.attenuation_db_per_km") !=
                  std::string::npos);
        }
    }
    SUBCASE("section not in scenario") {
        CHECK_THROWS_AS((void)parse_config(Scenario::wcp_rate, "[herald]\npair_p = 0.1\n"),
                        config_error);
    }
    SUBCASE("type mismatch") {
        CHECK_THROWS_AS(
            (void)parse_config(Scenario::herald, "[channel]\nlength_km = ten\n"),
            config_error);
    }
    SUBCASE("duplicate keys are rejected") {
        CHECK_THROWS_AS((void)parse_config(Scenario::herald,
                                           "[channel]\nlength_km = 1\nlength_km = 2\n"),
                        config_error);
    }
    SUBCASE("scenario mismatch is rejected") {
        CHECK_THROWS_AS((void)parse_config(Scenario::herald, "scenario = wcp-rate\n"),
                        config_error);
    }
}

TEST_CASE("overrides work and are validated") {
    ScenarioConfig c = parse_config(Scenario::wcp_rate, "");
    apply_override(c, "channel.length_km", "25");
    CHECK(c.channel.length_km == doctest::Approx(25.0));
    CHECK_THROWS_AS(apply_override(c, "herald.pair_p", "0.1"), config_error);
    CHECK_THROWS_AS(apply_override(c, "channel.length_km", "-5"), config_error);
}

TEST_CASE("sweep specification and evaluation") {
    const std::string text =
        "[sweep]\nparameter = channel.length_km\nstart = 1\nstop = 100\nsteps = 50\n"
        "scale = log\n";
    const ScenarioConfig c = parse_config(Scenario::wcp_rate, text);
    REQUIRE(c.sweep.has_value());
    const auto values = c.sweep->values();
    REQUIRE(values.size() == 50);
    CHECK(values.front() == doctest::Approx(1.0));
    CHECK(values.back() == doctest::Approx(100.0));

    const ResultTable table = run_scenario(c, 2);
    CHECK(table.rows.size() == 50);

    SUBCASE("sweeping an unknown or non-scenario parameter fails") {
        CHECK_THROWS_AS((void)parse_config(Scenario::wcp_rate,
                                           "[sweep]\nparameter = herald.pair_p\nstart = 0\n"
                                           "stop = 1\nsteps = 3\n"),
                        config_error);
    }
}

TEST_CASE("csv output shape and determinism") {
    const ScenarioConfig c = parse_config(
        Scenario::wcp_rate,
        "[sweep]\nparameter = channel.length_km\nstart = 10\nstop = 50\nsteps = 5\n");
    const ResultTable table = run_scenario(c, 1);
    const std::string csv = to_csv(table);

    // comment + header + 5 rows
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    CHECK(csv.rfind("# qlinksim", 0) == 0);
    CHECK(csv.find("config=" + c.digest()) != std::string::npos);
    CHECK(csv.find("protocol,distance_km,t,mu_opt,rate_bits_per_s") != std::string::npos);

    // byte-identical on a rerun, including through the parallel path
    const ResultTable again = run_scenario(parse_config(Scenario::wcp_rate,
                                                        "[sweep]\nparameter = channel.length_km\n"
                                                        "start = 10\nstop = 50\nsteps = 5\n"),
                                           4);
    CHECK(to_csv(again) == csv);
}

TEST_CASE("empty sweep yields a header-only table") {
    const ScenarioConfig c = parse_config(
        Scenario::wcp_rate,
        "[sweep]\nparameter = channel.length_km\nstart = 10\nstop = 50\nsteps = 0\n");
    const ResultTable table = run_scenario(c, 1);
    CHECK(table.rows.empty());
    const std::string csv = to_csv(table);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // comment + header
}

TEST_CASE("threshold scenario emits one row near 0.8284") {
    const ScenarioConfig c = parse_config(Scenario::chsh_threshold, "");
    const ResultTable table = run_scenario(c, 1);
    REQUIRE(table.rows.size() == 1);
    const double eta = std::get<double>(table.rows[0][0]);
    CHECK(eta == doctest::Approx(0.8284).epsilon(5e-4 / 0.8284));
}

TEST_CASE("repeater scenario with one link matches the bare link rate") {
    ScenarioConfig c = parse_config(Scenario::repeater_rate,
                                    "[repeater]\nlink_count = 1\narchitecture = dlcz\n");
    const ResultTable table = run_scenario(c, 1);
    REQUIRE(table.rows.size() == 1);
    const double rate = std::get<double>(table.rows[0][4]);
    const double p0 = link_success_probability(DlczLink{std::get<double>(table.rows[0][3])},
                                               c.repeater);
    const double t0 = (c.repeater.link_length_km() / c.repeater.fiber_speed_km_s) / p0;
    CHECK(rate == doctest::Approx(1.0 / t0).epsilon(1e-9));
}

TEST_CASE("herald scenario sweeps its own parameters") {
    const ScenarioConfig c = parse_config(
        Scenario::herald,
        "[herald]\non_demand_p1 = 1\non_demand_p2 = 0\ncoupling = 1\n"
        "[detector]\nefficiency = 1\n[channel]\nlength_km = 0\n"
        "[sweep]\nparameter = herald.pair_p\nstart = 1e-4\nstop = 4e-4\nsteps = 4\n");
    const ResultTable table = run_scenario(c, 2);
    REQUIRE(table.rows.size() == 4);
    // herald probability is linear in the pair probability at leading order
    const double first = std::get<double>(table.rows.front()[2]);
    const double last = std::get<double>(table.rows.back()[2]);
    CHECK(last / first == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("digest is stable under reordering-free config identity") {
    const ScenarioConfig a = parse_config(Scenario::herald, "[herald]\npair_p = 0.002\n");
    ScenarioConfig b = parse_config(Scenario::herald, "");
    apply_override(b, "herald.pair_p", "0.002");
    CHECK(a.digest() == b.digest());
    CHECK(a.digest() != parse_config(Scenario::herald, "").digest());
}
