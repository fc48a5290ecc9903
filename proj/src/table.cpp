#include "qlink/table.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qlink/errors.hpp"
#include "qlink/version.hpp"

namespace qlink {

void ResultTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw std::invalid_argument("ResultTable: row width does not match header");
    rows.push_back(std::move(row));
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[64];
    const double ax = std::abs(x);
    if (ax < 1e-3 || ax >= 1e6)
        std::snprintf(buf, sizeof(buf), "%.9e", x);
    else
        std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

namespace {

std::string escape_csv(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

} // namespace

void emit_csv(const ResultTable& table, std::ostream& out) {
    out << "# qlinksim " << (table.tool_version.empty() ? kVersion : table.tool_version)
        << " config=" << table.config_digest << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? "," : "") << escape_csv(table.columns[i]);
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            if (const double* d = std::get_if<double>(&row[i]))
                out << format_number(*d);
            else
                out << escape_csv(std::get<std::string>(row[i]));
        }
        out << "\n";
    }
}

std::string to_csv(const ResultTable& table) {
    std::ostringstream os;
    emit_csv(table, os);
    return os.str();
}

void emit_csv_file(const ResultTable& table, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw sim_error("emit_csv: cannot open '" + path + "' for writing");
    emit_csv(table, f);
    if (!f.good()) throw sim_error("emit_csv: write to '" + path + "' failed");
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace qlink
