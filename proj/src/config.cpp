#include "carbonfund/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace carbonfund {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

std::uint64_t fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

double parse_double(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError("invalid number for " + what + ": '" + text + "'");
    return x;
}

Vec parse_number_list(const std::string& text, const std::string& what) {
    Vec out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_double(item, what));
    }
    if (out.empty()) throw ConfigError("empty number list for " + what);
    return out;
}

Config Config::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    cfg.hash_ = fnv1a_hash(text);
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (const auto pos = t.find('#'); pos != std::string::npos) t = trim(t.substr(0, pos));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(line_no) + ": empty section name");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": key outside any [section]");
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s != sections_.end()) {
        const auto k = s->second.find(key);
        if (k != s->second.end()) return k->second;
    }
    throw ConfigError("missing config key [" + section + "] " + key);
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    if (!has(section, key)) return fallback;
    return parse_double(get(section, key), "[" + section + "] " + key);
}

double Config::require_double(const std::string& section, const std::string& key) const {
    return parse_double(get(section, key), "[" + section + "] " + key);
}

std::int64_t Config::get_int(const std::string& section, const std::string& key,
                             std::int64_t fallback) const {
    const double x = get_double(section, key, static_cast<double>(fallback));
    const auto i = static_cast<std::int64_t>(x);
    if (static_cast<double>(i) != x)
        throw ConfigError("[" + section + "] " + key + " must be an integer");
    return i;
}

std::uint64_t Config::get_uint(const std::string& section, const std::string& key,
                               std::uint64_t fallback) const {
    const std::int64_t i = get_int(section, key, static_cast<std::int64_t>(fallback));
    if (i < 0) throw ConfigError("[" + section + "] " + key + " must be non-negative");
    return static_cast<std::uint64_t>(i);
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("[" + section + "] " + key + " must be a boolean, got '" + v + "'");
}

Vec Config::get_vec(const std::string& section, const std::string& key) const {
    return parse_number_list(get(section, key), "[" + section + "] " + key);
}

Vec Config::get_vec_broadcast(const std::string& section, const std::string& key,
                              std::size_t n) const {
    Vec v = get_vec(section, key);
    if (v.size() == 1 && n > 1) v.assign(n, v[0]);
    if (v.size() != n)
        throw ConfigError("[" + section + "] " + key + " needs 1 or " + std::to_string(n) +
                          " entries, got " + std::to_string(v.size()));
    return v;
}

std::vector<Vec> Config::get_rows(const std::string& section, const std::string& key) const {
    const std::string text = get(section, key);
    std::vector<Vec> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) {
        if (trim(row).empty()) continue;
        rows.push_back(parse_number_list(row, "[" + section + "] " + key));
    }
    if (rows.empty()) throw ConfigError("empty matrix for [" + section + "] " + key);
    return rows;
}

namespace {

Mat rows_to_square(const std::vector<Vec>& rows, const std::string& what) {
    const std::size_t n = rows.size();
    Mat m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n)
            throw ConfigError(what + " must be square; row " + std::to_string(i + 1) + " has " +
                              std::to_string(rows[i].size()) + " entries for " +
                              std::to_string(n) + " rows");
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

} // namespace

Market build_market(const Config& cfg) {
    Vec mu = cfg.get_vec("market", "mu");
    Vec sigma = cfg.get_vec("market", "sigma");
    const std::size_t d = mu.size();
    Mat rho(d);
    if (cfg.has("market", "rho")) {
        rho = rows_to_square(cfg.get_rows("market", "rho"), "[market] rho");
    } else {
        for (std::size_t i = 0; i < d; ++i) rho(i, i) = 1.0;
    }
    const double r = cfg.get_double("market", "r", 0.05);
    return make_market(std::move(mu), std::move(sigma), std::move(rho), r);
}

std::unique_ptr<CarbonModel> build_carbon(const Config& cfg, std::size_t d) {
    const std::string model = cfg.get("carbon", "model", "square-root");
    if (model == "chain") {
        const std::vector<Vec> state_rows = cfg.get_rows("carbon", "states");
        for (const Vec& row : state_rows)
            if (row.size() != d)
                throw ConfigError("[carbon] states rows must have one entry per asset");
        const Mat q = rows_to_square(cfg.get_rows("carbon", "q"), "[carbon] q");
        Vec init;
        if (cfg.has("carbon", "initial")) {
            init = cfg.get_vec_broadcast("carbon", "initial", state_rows.size());
        } else {
            init.assign(state_rows.size(), 0.0);
            init[0] = 1.0;
        }
        return std::make_unique<ChainCarbon>(state_rows, q, init);
    }
    const Vec c0 = cfg.get_vec_broadcast("carbon", "c0", d);
    const Vec kappa = cfg.get_vec_broadcast("carbon", "kappa", d);
    const Vec lambda = cfg.get_vec_broadcast("carbon", "lambda", d);
    if (model == "square-root") {
        const Vec cbar = cfg.get_vec_broadcast("carbon", "cbar", d);
        return std::make_unique<SquareRootCarbon>(c0, cbar, kappa, lambda);
    }
    if (model == "ou") {
        const Vec cbar = cfg.get_vec_broadcast("carbon", "cbar", d);
        return std::make_unique<OuCarbon>(c0, cbar, kappa, lambda);
    }
    if (model == "exp-ou") {
        const Vec log_mean = cfg.get_vec_broadcast("carbon", "log_mean", d);
        return std::make_unique<ExpOuCarbon>(c0, log_mean, kappa, lambda);
    }
    throw ConfigError("[carbon] model must be square-root, ou, exp-ou or chain, got '" + model +
                      "'");
}

StrategySpec build_strategy(const Config& cfg, std::size_t d) {
    StrategySpec spec;
    spec.delta = cfg.get_double("strategy", "delta", 1.0);
    if (spec.delta <= 0.0) throw ConfigError("[strategy] delta must be positive");
    if (cfg.has("strategy", "alpha"))
        spec.alpha = cfg.get_vec_broadcast("strategy", "alpha", d);
    else
        spec.alpha.assign(d, 0.0);
    return spec;
}

Mortality build_mortality(const Config& cfg) {
    Mortality m;
    m.xi = cfg.get_double("mortality", "xi", m.xi);
    m.b = cfg.get_double("mortality", "b", m.b);
    m.m = cfg.get_double("mortality", "m", m.m);
    const std::string sign = cfg.get("mortality", "m_sign", "minus");
    if (sign == "minus")
        m.m_sign = -1;
    else if (sign == "plus")
        m.m_sign = 1;
    else
        throw ConfigError("[mortality] m_sign must be minus or plus, got '" + sign + "'");
    if (m.b <= 0.0) throw ConfigError("[mortality] b must be positive");
    if (m.xi < 0.0) throw ConfigError("[mortality] xi must be non-negative");
    return m;
}

ContractKind parse_contract_kind(const std::string& name) {
    if (name == "pure-endowment") return ContractKind::pure_endowment;
    if (name == "term-insurance") return ContractKind::term_insurance;
    if (name == "endowment-insurance") return ContractKind::endowment_insurance;
    throw ConfigError(
        "contract kind must be pure-endowment, term-insurance or endowment-insurance, got '" +
        name + "'");
}

Measure parse_measure(const std::string& name) {
    if (name == "pricing") return Measure::pricing;
    if (name == "physical") return Measure::physical;
    throw ConfigError("measure must be pricing or physical, got '" + name + "'");
}

Contract build_contract(const Config& cfg, ContractKind kind, double x0, double r) {
    CapMultipliers caps;
    caps.floor_mult = cfg.get_double("contract", "floor_mult", caps.floor_mult);
    caps.floor_rate_mult = cfg.get_double("contract", "floor_rate_mult", caps.floor_rate_mult);
    caps.cap_mult = cfg.get_double("contract", "cap_mult", caps.cap_mult);
    caps.cap_rate_mult = cfg.get_double("contract", "cap_rate_mult", caps.cap_rate_mult);
    const double maturity = cfg.get_double("contract", "maturity", 10.0);
    const auto age = static_cast<int>(cfg.get_int("contract", "age", 60));
    const double mix = cfg.get_double("contract", "mix", 1.0);
    return make_contract(kind, maturity, x0, r, caps, age, mix);
}

} // namespace carbonfund
