#pragma once

#include <stdexcept>
#include <string>

namespace qlink {

// Configuration problems (bad key, bad range, malformed file). CLI exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical or physical infeasibility discovered while running a model
// (degenerate herald, unreachable fidelity target, truncation overflow).
// CLI exit code 3.
class sim_error : public std::runtime_error {
public:
    explicit sim_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qlink
