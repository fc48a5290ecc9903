#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qlink/errors.hpp"
#include "qlink/scenario.hpp"
#include "qlink/version.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw qlink::config_error("cannot read config file '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

int run(qlink::Scenario scenario, const std::string& config_path,
        const std::vector<std::string>& overrides, const std::string& out_path, int jobs) {
    std::string text;
    if (!config_path.empty()) text = read_file(config_path);
    qlink::ScenarioConfig config = qlink::parse_config(scenario, text);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw qlink::config_error("--set expects key=value, got '" + kv + "'");
        qlink::apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
    }

    qlink::log(qlink::LogLevel::info,
               std::string("running scenario ") + qlink::scenario_name(scenario));
    const qlink::ResultTable table = qlink::run_scenario(config, jobs);
    if (out_path.empty())
        qlink::emit_csv(table, std::cout);
    else
        qlink::emit_csv_file(table, out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qlinksim - linear-optical quantum link rate and fidelity models"};
    app.set_version_flag("--version", std::string("qlinksim ") + qlink::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_path;
    int jobs = 1;

    for (const char* name : {"herald", "diqkd-rate", "wcp-rate", "repeater-rate",
                             "chsh-threshold"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "sectioned key=value config file");
        sub->add_option("--set", overrides, "override, repeatable: section.key=value");
        sub->add_option("--out", out_path, "CSV destination (default stdout)");
        sub->add_option("--jobs", jobs, "parallel sweep workers")->check(CLI::PositiveNumber);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const auto scenario = qlink::scenario_from_name(app.get_subcommands().front()->get_name());
        return run(scenario, config_path, overrides, out_path, jobs);
    } catch (const qlink::config_error& e) {
        qlink::log(qlink::LogLevel::error, e.what());
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        qlink::log(qlink::LogLevel::error, e.what());
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
