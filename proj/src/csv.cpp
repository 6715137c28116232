#include "carbonfund/csv.hpp"

#include <cstdio>
#include <sstream>

#include "carbonfund/version.hpp"

namespace carbonfund {

std::string csv_quote(const std::string& field) {
    const bool needs =
        field.find_first_of(",\"\n\r") != std::string::npos ||
        (!field.empty() && (field.front() == ' ' || field.back() == ' '));
    if (!needs) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_number(double x) {
    char buf[40];
    // shortest representation that round-trips
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == x) break;
    }
    return buf;
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\n"; }

void CsvWriter::header(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << csv_quote(cells[i]);
    }
    out_ << "\n";
}

void write_provenance(CsvWriter& csv, std::uint64_t seed, std::uint64_t config_hash) {
    std::ostringstream line;
    line << "fundtool " << kVersion << " seed=" << seed << " config=" << std::hex
         << config_hash;
    csv.comment(line.str());
}

} // namespace carbonfund
