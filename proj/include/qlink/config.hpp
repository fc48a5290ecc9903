#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qlink/diqkd.hpp"
#include "qlink/repeater.hpp"
#include "qlink/wcp.hpp"

namespace qlink {

enum class Scenario { herald, diqkd_rate, wcp_rate, repeater_rate, chsh_threshold };

const char* scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);  // throws config_error

struct SweepSpec {
    std::string parameter;  // dotted "section.key" path of a numeric field
    double start = 0.0;
    double stop = 0.0;
    int steps = 0;
    bool log_scale = false;

    std::vector<double> values() const;
};

// Fully-resolved scenario parameters. Defaults are the reference operating
// point used throughout: 0.2 dB/km fiber, detection efficiency 0.8, coupling
// 0.9, 10 GHz repetition rate.
struct ScenarioConfig {
    Scenario scenario = Scenario::herald;

    // [channel]
    ChannelModel channel{10.0, 0.2};
    // [detector]
    DetectorModel detector{DetectorKind::threshold, 0.8, 0.0};
    // [run]
    double repetition_rate_hz = 1e10;
    int truncation = 2;
    // [herald]
    double pair_p = 1e-3;
    double bs_transmission = 1e-2;
    double coupling = 0.9;
    bool on_demand = true;
    double on_demand_p1 = 0.95;
    double on_demand_p2 = 1e-4;
    double heralded_sps_p = 0.01;
    // [diqkd]
    double di_efficiency = 0.95;
    double trusted_efficiency = 0.8;
    // [wcp]
    WcpProtocol wcp = WcpProtocol::bb84();
    // [repeater]
    RepeaterConfig repeater;
    std::string repeater_architecture = "both";  // dlcz | sps | both
    double sps_p1 = 0.95;
    double sps_p2 = 1e-4;
    double dlcz_p = -1.0;  // <= 0: derive from the fidelity budget

    std::optional<SweepSpec> sweep;

    HeraldSchemeParams herald_params() const;

    // Canonical flat rendering of every field; hashing it gives the digest
    // that the CSV comment line carries.
    std::string canonical_text() const;
    std::string digest() const;
};

// Parses the sectioned key=value format. Unknown sections, unknown keys,
// type errors and out-of-range values raise config_error naming the key and
// line. Sections must belong to the scenario.
ScenarioConfig parse_config(Scenario scenario, const std::string& text);

// Applies one "section.key=value" override (the --set flag).
void apply_override(ScenarioConfig& config, const std::string& dotted_key,
                    const std::string& value);

namespace detail {
// Sets one numeric field by dotted path (the sweep mechanism).
void set_numeric_field(ScenarioConfig& config, const std::string& path, double value);
} // namespace detail

} // namespace qlink
