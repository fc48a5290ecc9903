#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace qlink {

// Rectangular result set with deterministic row order (sweep order).
struct ResultTable {
    using Cell = std::variant<double, std::string>;

    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::string tool_version;
    std::string config_digest;

    void add_row(std::vector<Cell> row);
};

// Numeric cell rendering: '.' decimal separator, scientific notation for
// 0 < |x| < 1e-3 or |x| >= 1e6, 10 significant digits otherwise.
std::string format_number(double x);

// RFC-4180-style CSV: one leading '#' comment line carrying the tool version
// and config digest, then the header, then the data rows. Byte-stable for a
// fixed config.
void emit_csv(const ResultTable& table, std::ostream& out);
void emit_csv_file(const ResultTable& table, const std::string& path);
std::string to_csv(const ResultTable& table);

// FNV-1a 64-bit, used as the config digest.
std::string fnv1a_hex(const std::string& bytes);

} // namespace qlink
