#include "qlink/scenario.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>

#include "qlink/diqkd.hpp"
#include "qlink/errors.hpp"
#include "qlink/repeater.hpp"
#include "qlink/version.hpp"
#include "qlink/wcp.hpp"

namespace qlink {

namespace {

LogLevel current_log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("QLINKSIM_LOG");
        if (!env) return LogLevel::warn;
        const std::string v(env);
        if (v == "error") return LogLevel::error;
        if (v == "warn") return LogLevel::warn;
        if (v == "info") return LogLevel::info;
        if (v == "debug") return LogLevel::debug;
        return LogLevel::warn;
    }();
    return level;
}

std::vector<ResultTable::Cell> wcp_row(const ScenarioConfig& c) {
    const double t = channel_transmission(c.channel);
    const OptimalMu best =
        optimal_mu(c.wcp, c.channel, c.detector.efficiency, c.repetition_rate_hz);
    return {c.wcp.name(), c.channel.length_km, t, best.mu, best.rate_bits_per_s};
}

std::vector<std::vector<ResultTable::Cell>> herald_rows(const ScenarioConfig& c) {
    const HeraldOutcome h = run_herald_circuit(c.herald_params(), Truncation(c.truncation));
    return {{c.channel.length_km, std::string(c.on_demand ? "on_demand" : "heralded"),
             h.herald_probability, h.heralded_rate_hz, h.fidelity_to_bell,
             h.conditional_state.subspace_probability, h.source_ready_probability}};
}

std::vector<std::vector<ResultTable::Cell>> diqkd_rows(const ScenarioConfig& c) {
    const auto points = rate_vs_distance(c.herald_params(), {c.channel.length_km},
                                         Truncation(c.truncation), c.di_efficiency,
                                         c.trusted_efficiency);
    std::vector<std::vector<ResultTable::Cell>> rows;
    for (const auto& p : points)
        rows.push_back({p.distance_km, p.variant, p.detection_eff, p.herald_prob, p.s_value,
                        p.qber, p.key_rate_bits_per_s});
    return rows;
}

std::vector<std::vector<ResultTable::Cell>> repeater_rows(const ScenarioConfig& c) {
    std::vector<std::vector<ResultTable::Cell>> rows;
    const double n = c.repeater.link_count;
    const bool want_dlcz = c.repeater_architecture != "sps";
    const bool want_sps = c.repeater_architecture != "dlcz";
    RepeaterPoint dlcz;
    if (want_dlcz || want_sps) dlcz = repeater_rate(DlczLink{c.dlcz_p}, c.repeater);
    if (want_dlcz)
        rows.push_back({std::string("dlcz"), c.repeater.total_length_km, n, dlcz.emission_prob,
                        dlcz.rate_hz, dlcz.fidelity, 1.0});
    if (want_sps) {
        const RepeaterPoint sps = repeater_rate(SpsLink{c.sps_p1, c.sps_p2, -1.0}, c.repeater);
        rows.push_back({std::string("sps"), c.repeater.total_length_km, n, sps.emission_prob,
                        sps.rate_hz, sps.fidelity, sps.rate_hz / dlcz.rate_hz});
    }
    return rows;
}

std::vector<std::vector<ResultTable::Cell>> rows_for_point(const ScenarioConfig& c) {
    switch (c.scenario) {
        case Scenario::herald: return herald_rows(c);
        case Scenario::diqkd_rate: return diqkd_rows(c);
        case Scenario::wcp_rate: return {wcp_row(c)};
        case Scenario::repeater_rate: return repeater_rows(c);
        case Scenario::chsh_threshold: return {{detection_threshold()}};
    }
    throw sim_error("run_scenario: unhandled scenario");
}

std::vector<std::string> columns_for(Scenario s) {
    switch (s) {
        case Scenario::herald:
            return {"distance_km", "variant", "herald_prob", "heralded_rate_hz",
                    "fidelity_to_bell", "subspace_prob", "source_ready_prob"};
        case Scenario::diqkd_rate:
            return {"distance_km", "variant", "detection_eff", "herald_prob", "S", "qber",
                    "key_rate_bits_per_s"};
        case Scenario::wcp_rate:
            return {"protocol", "distance_km", "t", "mu_opt", "rate_bits_per_s"};
        case Scenario::repeater_rate:
            return {"architecture", "L_km", "N", "p", "rate_hz", "fidelity", "ratio"};
        case Scenario::chsh_threshold:
            return {"threshold_efficiency"};
    }
    throw sim_error("run_scenario: unhandled scenario");
}

} // namespace

void log(LogLevel level, const std::string& message) {
    static std::mutex mtx;
    if (static_cast<int>(level) > static_cast<int>(current_log_level())) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::lock_guard<std::mutex> lock(mtx);
    std::cerr << "qlinksim [" << names[static_cast<int>(level)] << "] " << message << "\n";
}

ResultTable run_scenario(const ScenarioConfig& config, int jobs) {
    if (jobs < 1) throw config_error("jobs must be >= 1");

    ResultTable table;
    table.columns = columns_for(config.scenario);
    table.tool_version = kVersion;
    table.config_digest = config.digest();

    if (!config.sweep || config.scenario == Scenario::chsh_threshold) {
        for (auto& row : rows_for_point(config)) table.add_row(std::move(row));
        return table;
    }

    const std::vector<double> values = config.sweep->values();
    log(LogLevel::info, "sweeping " + config.sweep->parameter + " over " +
                            std::to_string(values.size()) + " points");
    std::vector<std::vector<std::vector<ResultTable::Cell>>> results(values.size());
    std::vector<std::string> errors(values.size());

    auto eval_point = [&](std::size_t i) {
        try {
            ScenarioConfig point = config;
            detail::set_numeric_field(point, config.sweep->parameter, values[i]);
            results[i] = rows_for_point(point);
            log(LogLevel::debug, "point " + std::to_string(i) + " done");
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };

    if (jobs == 1 || values.size() <= 1) {
        for (std::size_t i = 0; i < values.size(); ++i) eval_point(i);
    } else {
        std::atomic<std::size_t> next{0};
        const int workers = std::min<int>(jobs, static_cast<int>(values.size()));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < values.size();
                     i = next.fetch_add(1))
                    eval_point(i);
            });
        for (auto& th : pool) th.join();
    }

    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!errors[i].empty())
            throw sim_error("sweep point " + std::to_string(i) + " (" +
                            config.sweep->parameter + " = " + format_number(values[i]) +
                            "): " + errors[i]);
        for (auto& row : results[i]) table.add_row(std::move(row));
    }
    return table;
}

} // namespace qlink
