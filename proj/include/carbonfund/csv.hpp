#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace carbonfund {

// Quote a field when it contains a comma, quote, newline or outer whitespace;
// embedded quotes are doubled.
std::string csv_quote(const std::string& field);

// Shortest round-trip decimal representation of a double.
std::string csv_number(double x);

class CsvWriter {
  public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    // '# ...' line; consumers that dislike comments can strip the prefix.
    void comment(const std::string& text);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);

  private:
    std::ostream& out_;
};

// Standard first line of every produced table: tool version, seed and the
// hash of the configuration that generated it.
void write_provenance(CsvWriter& csv, std::uint64_t seed, std::uint64_t config_hash);

} // namespace carbonfund
