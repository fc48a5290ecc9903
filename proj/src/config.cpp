#include "qlink/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "qlink/errors.hpp"
#include "qlink/table.hpp"

namespace qlink {

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::herald: return "herald";
        case Scenario::diqkd_rate: return "diqkd-rate";
        case Scenario::wcp_rate: return "wcp-rate";
        case Scenario::repeater_rate: return "repeater-rate";
        case Scenario::chsh_threshold: return "chsh-threshold";
    }
    return "?";
}

Scenario scenario_from_name(const std::string& name) {
    for (Scenario s : {Scenario::herald, Scenario::diqkd_rate, Scenario::wcp_rate,
                       Scenario::repeater_rate, Scenario::chsh_threshold})
        if (name == scenario_name(s)) return s;
    throw config_error("unknown scenario '" + name + "'");
}

std::vector<double> SweepSpec::values() const {
    std::vector<double> out;
    if (steps <= 0) return out;
    if (steps == 1) return {start};
    for (int i = 0; i < steps; ++i) {
        const double f = static_cast<double>(i) / (steps - 1);
        if (log_scale)
            out.push_back(start * std::pow(stop / start, f));
        else
            out.push_back(start + f * (stop - start));
    }
    return out;
}

HeraldSchemeParams ScenarioConfig::herald_params() const {
    HeraldSchemeParams p;
    p.pair_p = pair_p;
    p.bs_transmission = bs_transmission;
    p.channel = channel;
    p.coupling = coupling;
    p.station_detectors = detector;
    p.repetition_rate_hz = repetition_rate_hz;
    p.on_demand = on_demand;
    p.on_demand_p1 = on_demand_p1;
    p.on_demand_p2 = on_demand_p2;
    p.heralded_sps_p = heralded_sps_p;
    return p;
}

namespace {

struct Where {
    int line = 0;  // 0: command-line override
    std::string key;
    std::string at() const {
        if (line > 0) return "'" + key + "' (line " + std::to_string(line) + ")";
        return "'" + key + "' (--set)";
    }
};

double parse_number(const std::string& v, const Where& w) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw config_error("expected a number for " + w.at() + ", got '" + v + "'");
    return x;
}

int parse_integer(const std::string& v, const Where& w) {
    const double x = parse_number(v, w);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x)
        throw config_error("expected an integer for " + w.at() + ", got '" + v + "'");
    return i;
}

bool parse_boolean(const std::string& v, const Where& w) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw config_error("expected true/false for " + w.at() + ", got '" + v + "'");
}

void require(bool ok, const std::string& msg, const Where& w) {
    if (!ok) throw config_error(msg + " for " + w.at());
}

struct Field {
    // Consumes the raw value (range-checked); null when the field is not of
    // that kind.
    std::function<void(ScenarioConfig&, const std::string&, const Where&)> set;
    std::function<void(ScenarioConfig&, double, const Where&)> set_num;  // sweepable
    std::function<std::string(const ScenarioConfig&)> render;
};

using FieldMap = std::map<std::string, Field>;  // "section.key" -> field

std::string render_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

Field num_field(double ScenarioConfig::* member,
                std::function<void(double, const Where&)> check = nullptr) {
    Field f;
    f.set_num = [member, check](ScenarioConfig& c, double x, const Where& w) {
        if (check) check(x, w);
        c.*member = x;
    };
    f.set = [f](ScenarioConfig& c, const std::string& v, const Where& w) {
        f.set_num(c, parse_number(v, w), w);
    };
    f.render = [member](const ScenarioConfig& c) { return render_num(c.*member); };
    return f;
}

auto probability_check(const char* what) {
    return [what](double x, const Where& w) {
        require(x >= 0.0 && x <= 1.0, std::string(what) + " must lie in [0,1]", w);
    };
}

auto positive_check(const char* what) {
    return [what](double x, const Where& w) {
        require(x > 0.0, std::string(what) + " must be > 0", w);
    };
}

const FieldMap& field_map() {
    static const FieldMap map = [] {
        FieldMap m;

        // [channel]
        {
            Field f;
            f.set_num = [](ScenarioConfig& c, double x, const Where& w) {
                require(x >= 0.0, "length must be >= 0", w);
                c.channel.length_km = x;
            };
            f.set = [f](ScenarioConfig& c, const std::string& v, const Where& w) {
                f.set_num(c, parse_number(v, w), w);
            };
            f.render = [](const ScenarioConfig& c) { return render_num(c.channel.length_km); };
            m["channel.length_km"] = f;
        }
        {
            Field f;
            f.set_num = [](ScenarioConfig& c, double x, const Where& w) {
                require(x >= 0.0, "attenuation must be >= 0", w);
                c.channel.attenuation_db_per_km = x;
            };
            f.set = [f](ScenarioConfig& c, const std::string& v, const Where& w) {
                f.set_num(c, parse_number(v, w), w);
            };
            f.render = [](const ScenarioConfig& c) {
                return render_num(c.channel.attenuation_db_per_km);
            };
            m["channel.attenuation_db_per_km"] = f;
        }

        // [detector]
        {
            Field f;
            f.set = [](ScenarioConfig& c, const std::string& v, const Where& w) {
                if (v == "threshold") c.detector.kind = DetectorKind::threshold;
                else if (v == "number_resolving") c.detector.kind = DetectorKind::number_resolving;
                else throw config_error("expected threshold|number_resolving for " + w.at());
            };
            f.render = [](const ScenarioConfig& c) {
                return std::string(c.detector.kind == DetectorKind::threshold
                                       ? "threshold" : "number_resolving");
            };
            m["detector.kind"] = f;
        }
        {
            Field f;
            f.set_num = [](ScenarioConfig& c, double x, const Where& w) {
                require(x >= 0.0 && x <= 1.0, "efficiency must lie in [0,1]", w);
                c.detector.efficiency = x;
            };
            f.set = [f](ScenarioConfig& c, const std::string& v, const Where& w) {
                f.set_num(c, parse_number(v, w), w);
            };
            f.render = [](const ScenarioConfig& c) { return render_num(c.detector.efficiency); };
            m["detector.efficiency"] = f;
        }
        {
            Field f;
            f.set_num = [](ScenarioConfig& c, double x, const Where& w) {
                require(x >= 0.0 && x < 1.0, "dark probability must lie in [0,1)", w);
                c.detector.dark_prob = x;
            };
            f.set = [f](ScenarioConfig& c, const std::string& v, const Where& w) {
                f.set_num(c, parse_number(v, w), w);
            };
            f.render = [](const ScenarioConfig& c) { return render_num(c.detector.dark_prob); };
            m["detector.dark_prob"] = f;
        }

        // [run]
        m["run.repetition_rate_hz"] =
            num_field(&ScenarioConfig::repetition_rate_hz, positive_check("repetition rate"));
        {
            Field f;
            f.set = [](ScenarioConfig& c, const std::string& v, const Where& w) {
                const int n = parse_integer(v, w);
                require(n >= 1, "truncation must be >= 1", w);
                require(n <= 16, "truncation above 16 is not supported", w);
                c.truncation = n;
            };
            f.render = [](const ScenarioConfig& c) { return std::to_string(c.truncation); };
            m["run.truncation"] = f;
        }

        // [herald]
        m["herald.pair_p"] = num_field(&ScenarioConfig::pair_p, probability_check("pair_p"));
        m["herald.bs_transmission"] =
            num_field(&ScenarioConfig::bs_transmission, probability_check("bs_transmission"));
        m["herald.coupling"] = num_field(&ScenarioConfig::coupling, probability_check("coupling"));
        {
            Field f;
            f.set = [](ScenarioConfig& c, const std::string& v, const Where& w) {
                c.on_demand = parse_boolean(v, w);
            };
            f.render = [](const ScenarioConfig& c) {
                return std::string(c.on_demand ? "true" : "false");
            };
            m["herald.on_demand"] = f;
        }
        m["herald.on_demand_p1"] =
            num_field(&ScenarioConfig::on_demand_p1, probability_check("on_demand_p1"));
        m["herald.on_demand_p2"] =
            num_field(&ScenarioConfig::on_demand_p2, probability_check("on_demand_p2"));
        m["herald.heralded_sps_p"] =
            num_field(&ScenarioConfig::heralded_sps_p, probability_check("heralded_sps_p"));

        // [diqkd]
        m["diqkd.di_efficiency"] =
            num_field(&ScenarioConfig::di_efficiency, probability_check("di_efficiency"));
        m["diqkd.trusted_efficiency"] =
            num_field(&ScenarioConfig::trusted_efficiency, probability_check("trusted_efficiency"));

        // [wcp]
        {
            Field f;
            f.set = [](ScenarioConfig& c, const std::string& v, const Where& w) {
                if (v == "bb84") c.wcp = WcpProtocol::bb84();
                else if (v == "sarg") c.wcp = WcpProtocol::sarg();
                else throw config_error("expected bb84|sarg for " + w.at());
            };
            f.render = [](const ScenarioConfig& c) { return c.wcp.name(); };
            m["wcp.protocol"] = f;
        }

        // [repeater]
        {
            Field f;
            f.set_num = [](ScenarioConfig& c, double x, const Where& w) {
                require(x > 0.0, "total length must be > 0", w);
                c.repeater.total_length_km = x;
            };
            f.set = [f](ScenarioConfig& c, const std::string& v, const Where& w) {
                f.set_num(c, parse_number(v, w), w);
            };
            f.render = [](const ScenarioConfig& c) {
                return render_num(c.repeater.total_length_km);
            };
            m["repeater.total_length_km"] = f;
        }
        {
            Field f;
            f.set = [](ScenarioConfig& c, const std::string& v, const Where& w) {
                const int n = parse_integer(v, w);
                require(n >= 1 && (n & (n - 1)) == 0, "link count must be a power of 2", w);
                c.repeater.link_count = n;
            };
            f.render = [](const ScenarioConfig& c) {
                return std::to_string(c.repeater.link_count);
            };
            m["repeater.link_count"] = f;
        }
        {
            Field f;
            f.set_num = [](ScenarioConfig& c, double x, const Where& w) {
                require(x >= 0.0, "attenuation must be >= 0", w);
                c.repeater.attenuation_db_per_km = x;
            };
            f.set = [f](ScenarioConfig& c, const std::string& v, const Where& w) {
                f.set_num(c, parse_number(v, w), w);
            };
            f.render = [](const ScenarioConfig& c) {
                return render_num(c.repeater.attenuation_db_per_km);
            };
            m["repeater.attenuation_db_per_km"] = f;
        }
        {
            Field f;
            f.set_num = [](ScenarioConfig& c, double x, const Where& w) {
                require(x > 0.0, "fiber speed must be > 0", w);
                c.repeater.fiber_speed_km_s = x;
            };
            f.set = [f](ScenarioConfig& c, const std::string& v, const Where& w) {
                f.set_num(c, parse_number(v, w), w);
            };
            f.render = [](const ScenarioConfig& c) {
                return render_num(c.repeater.fiber_speed_km_s);
            };
            m["repeater.fiber_speed_km_s"] = f;
        }
        {
            Field f;
            f.set_num = [](ScenarioConfig& c, double x, const Where& w) {
                require(x >= 0.0 && x <= 1.0, "detector efficiency must lie in [0,1]", w);
                c.repeater.detector_eff = x;
            };
            f.set = [f](ScenarioConfig& c, const std::string& v, const Where& w) {
                f.set_num(c, parse_number(v, w), w);
            };
            f.render = [](const ScenarioConfig& c) { return render_num(c.repeater.detector_eff); };
            m["repeater.detector_eff"] = f;
        }
        {
            Field f;
            f.set_num = [](ScenarioConfig& c, double x, const Where& w) {
                require(x >= 0.0 && x <= 1.0, "memory efficiency must lie in [0,1]", w);
                c.repeater.memory_eff = x;
            };
            f.set = [f](ScenarioConfig& c, const std::string& v, const Where& w) {
                f.set_num(c, parse_number(v, w), w);
            };
            f.render = [](const ScenarioConfig& c) { return render_num(c.repeater.memory_eff); };
            m["repeater.memory_eff"] = f;
        }
        {
            Field f;
            f.set_num = [](ScenarioConfig& c, double x, const Where& w) {
                require(x > 0.0 && x < 1.0, "fidelity target must lie in (0,1)", w);
                c.repeater.fidelity_target = x;
            };
            f.set = [f](ScenarioConfig& c, const std::string& v, const Where& w) {
                f.set_num(c, parse_number(v, w), w);
            };
            f.render = [](const ScenarioConfig& c) {
                return render_num(c.repeater.fidelity_target);
            };
            m["repeater.fidelity_target"] = f;
        }
        {
            Field f;
            f.set_num = [](ScenarioConfig& c, double x, const Where& w) {
                require(x > 0.0, "error constant must be > 0", w);
                c.repeater.error_constant = x;
            };
            f.set = [f](ScenarioConfig& c, const std::string& v, const Where& w) {
                f.set_num(c, parse_number(v, w), w);
            };
            f.render = [](const ScenarioConfig& c) {
                return render_num(c.repeater.error_constant);
            };
            m["repeater.error_constant"] = f;
        }
        {
            Field f;
            f.set = [](ScenarioConfig& c, const std::string& v, const Where& w) {
                if (v != "dlcz" && v != "sps" && v != "both")
                    throw config_error("expected dlcz|sps|both for " + w.at());
                c.repeater_architecture = v;
            };
            f.render = [](const ScenarioConfig& c) { return c.repeater_architecture; };
            m["repeater.architecture"] = f;
        }
        m["repeater.sps_p1"] = num_field(&ScenarioConfig::sps_p1, probability_check("sps_p1"));
        m["repeater.sps_p2"] = num_field(&ScenarioConfig::sps_p2, probability_check("sps_p2"));
        m["repeater.dlcz_p"] = num_field(&ScenarioConfig::dlcz_p, [](double x, const Where& w) {
            require(x <= 1.0, "dlcz_p must be <= 1 (non-positive derives it)", w);
        });

        return m;
    }();
    return map;
}

const std::set<std::string>& allowed_sections(Scenario s) {
    static const std::map<Scenario, std::set<std::string>> allowed = {
        {Scenario::herald, {"channel", "detector", "run", "herald", "sweep"}},
        {Scenario::diqkd_rate, {"channel", "detector", "run", "herald", "diqkd", "sweep"}},
        {Scenario::wcp_rate, {"channel", "detector", "run", "wcp", "sweep"}},
        {Scenario::repeater_rate, {"repeater", "sweep"}},
        {Scenario::chsh_threshold, {}},
    };
    return allowed.at(s);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

void apply_sweep_key(SweepSpec& sweep, const std::string& key, const std::string& value,
                     const Where& w) {
    if (key == "parameter") {
        sweep.parameter = value;
    } else if (key == "start") {
        sweep.start = parse_number(value, w);
    } else if (key == "stop") {
        sweep.stop = parse_number(value, w);
    } else if (key == "steps") {
        const int n = parse_integer(value, w);
        require(n >= 0, "steps must be >= 0", w);
        sweep.steps = n;
    } else if (key == "scale") {
        if (value == "linear") sweep.log_scale = false;
        else if (value == "log") sweep.log_scale = true;
        else throw config_error("expected linear|log for " + w.at());
    } else {
        throw config_error("unknown key " + w.at());
    }
}

void validate_sweep(const ScenarioConfig& config) {
    if (!config.sweep) return;
    const SweepSpec& sw = *config.sweep;
    if (sw.parameter.empty()) throw config_error("sweep.parameter is required");
    const auto it = field_map().find(sw.parameter);
    if (it == field_map().end() || !it->second.set_num)
        throw config_error("sweep.parameter '" + sw.parameter + "' is not a numeric parameter");
    const std::string section = sw.parameter.substr(0, sw.parameter.find('.'));
    if (!allowed_sections(config.scenario).count(section))
        throw config_error("sweep.parameter '" + sw.parameter + "' does not belong to scenario '" +
                           scenario_name(config.scenario) + "'");
    if (sw.log_scale && (sw.start <= 0.0 || sw.stop <= 0.0))
        throw config_error("sweep: log scale needs positive start/stop");
    if (sw.steps > 1000000) throw config_error("sweep: too many steps");
}

} // namespace

ScenarioConfig parse_config(Scenario scenario, const std::string& text) {
    ScenarioConfig config;
    config.scenario = scenario;
    const auto& sections = allowed_sections(scenario);
    const auto& fields = field_map();

    std::string section;
    std::set<std::string> seen_keys;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("malformed section header at line " + std::to_string(line_no));
            section = trim(line.substr(1, line.size() - 2));
            if (!sections.count(section))
                throw config_error("section '[" + section + "]' (line " + std::to_string(line_no) +
                                   ") is not valid for scenario '" + scenario_name(scenario) + "'");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("expected key = value at line " + std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error("empty key at line " + std::to_string(line_no));

        if (section.empty()) {
            if (key == "scenario") {
                if (scenario_from_name(value) != scenario)
                    throw config_error("config is for scenario '" + value +
                                       "' but scenario '" + std::string(scenario_name(scenario)) +
                                       "' was requested (line " + std::to_string(line_no) + ")");
                continue;
            }
            throw config_error("key '" + key + "' outside any section (line " +
                               std::to_string(line_no) + ")");
        }

        const std::string path = section + "." + key;
        Where w{line_no, path};
        if (!seen_keys.insert(path).second)
            throw config_error("duplicate key " + w.at());

        if (section == "sweep") {
            if (!config.sweep) config.sweep.emplace();
            apply_sweep_key(*config.sweep, key, value, w);
            continue;
        }
        const auto it = fields.find(path);
        if (it == fields.end()) throw config_error("unknown key " + w.at());
        it->second.set(config, value, w);
    }
    validate_sweep(config);
    return config;
}

void apply_override(ScenarioConfig& config, const std::string& dotted_key,
                    const std::string& value) {
    Where w{0, dotted_key};
    const std::string section = dotted_key.substr(0, dotted_key.find('.'));
    if (!allowed_sections(config.scenario).count(section))
        throw config_error("key " + w.at() + " does not belong to scenario '" +
                           scenario_name(config.scenario) + "'");
    if (section == "sweep") {
        if (!config.sweep) config.sweep.emplace();
        apply_sweep_key(*config.sweep, dotted_key.substr(section.size() + 1), value, w);
        validate_sweep(config);
        return;
    }
    const auto it = field_map().find(dotted_key);
    if (it == field_map().end()) throw config_error("unknown key " + w.at());
    it->second.set(config, value, w);
    validate_sweep(config);
}

std::string ScenarioConfig::canonical_text() const {
    std::ostringstream os;
    os << "scenario=" << scenario_name(scenario) << "\n";
    for (const auto& [path, field] : field_map())
        os << path << "=" << field.render(*this) << "\n";
    if (sweep) {
        os << "sweep.parameter=" << sweep->parameter << "\n";
        os << "sweep.start=" << render_num(sweep->start) << "\n";
        os << "sweep.stop=" << render_num(sweep->stop) << "\n";
        os << "sweep.steps=" << sweep->steps << "\n";
        os << "sweep.scale=" << (sweep->log_scale ? "log" : "linear") << "\n";
    }
    return os.str();
}

std::string ScenarioConfig::digest() const { return fnv1a_hex(canonical_text()); }

namespace detail {

// Exposed for the scenario runner: numeric setter used by sweeps.
void set_numeric_field(ScenarioConfig& config, const std::string& path, double value) {
    const auto it = field_map().find(path);
    if (it == field_map().end() || !it->second.set_num)
        throw config_error("sweep parameter '" + path + "' is not numeric");
    Where w{0, path};
    it->second.set_num(config, value, w);
}

} // namespace detail

} // namespace qlink
