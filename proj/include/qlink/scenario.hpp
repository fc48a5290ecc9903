#pragma once

#include "qlink/config.hpp"
#include "qlink/table.hpp"

namespace qlink {

// Evaluates the configured scenario (running the sweep if one is present)
// and returns the result table. Sweep points are independent; with jobs > 1
// they run on a thread pool, and rows always appear in sweep order.
ResultTable run_scenario(const ScenarioConfig& config, int jobs = 1);

// Minimal severity-filtered stderr logger; the level comes from the
// QLINKSIM_LOG environment variable (error, warn, info, debug).
enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };
void log(LogLevel level, const std::string& message);

} // namespace qlink
