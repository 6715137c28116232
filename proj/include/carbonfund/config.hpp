#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "carbonfund/carbon.hpp"
#include "carbonfund/errors.hpp"
#include "carbonfund/fund.hpp"
#include "carbonfund/linalg.hpp"
#include "carbonfund/market.hpp"
#include "carbonfund/mortality.hpp"
#include "carbonfund/pricing.hpp"
#include "carbonfund/strategy.hpp"

namespace carbonfund {

// Sectioned key/value file. Lines starting with '#' or ';' are comments and
// a trailing '#' starts an end-of-line comment; values themselves may contain
// ';' (matrix rows are ';'-separated).
class Config {
  public:
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    // Raw access; throws ConfigError when the key is required but absent.
    std::string get(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;

    double get_double(const std::string& section, const std::string& key, double fallback) const;
    double require_double(const std::string& section, const std::string& key) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    // Comma-separated list of numbers.
    Vec get_vec(const std::string& section, const std::string& key) const;
    // Like get_vec, but a single scalar is broadcast to length n.
    Vec get_vec_broadcast(const std::string& section, const std::string& key, std::size_t n) const;
    // ';'-separated rows of comma-separated numbers.
    std::vector<Vec> get_rows(const std::string& section, const std::string& key) const;

    // FNV-1a hash of the raw file bytes, for output provenance.
    std::uint64_t hash() const { return hash_; }

  private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::uint64_t hash_ = 0;
};

std::uint64_t fnv1a_hash(const std::string& bytes);

double parse_double(const std::string& text, const std::string& what);
Vec parse_number_list(const std::string& text, const std::string& what);

// Builders assembling the model objects from a parsed configuration.
Market build_market(const Config& cfg);
std::unique_ptr<CarbonModel> build_carbon(const Config& cfg, std::size_t d);
StrategySpec build_strategy(const Config& cfg, std::size_t d);
Mortality build_mortality(const Config& cfg);
ContractKind parse_contract_kind(const std::string& name);
Measure parse_measure(const std::string& name);
Contract build_contract(const Config& cfg, ContractKind kind, double x0, double r);

} // namespace carbonfund
