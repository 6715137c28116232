// Command-line frontend: prices unit-linked contracts on the carbon-penalized
// optimal fund, reports variance-reduction quality, backtests hedges, solves
// the value factor and dumps simulated paths.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "carbonfund/config.hpp"
#include "carbonfund/csv.hpp"
#include "carbonfund/hedging.hpp"
#include "carbonfund/parallel.hpp"
#include "carbonfund/pricing.hpp"
#include "carbonfund/value_function.hpp"
#include "carbonfund/version.hpp"

namespace cf = carbonfund;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out;
    std::string contract;  // empty = use config
    std::string measure;   // empty = use config
    std::string m_sign;    // empty = use config
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned threads = 0;
    std::size_t replications = 0;  // 0 = use config
    std::size_t paths = 10;
};

// Everything assembled from one configuration file.
struct Session {
    cf::Config cfg;
    cf::Market market;
    std::unique_ptr<cf::CarbonModel> carbon;
    cf::StrategySpec strategy;
    cf::Mortality mortality;
    double x0 = 1.0;
    double steps_per_year = 5.0;
    std::size_t replications = 100000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    cf::Measure measure = cf::Measure::pricing;
};

Session open_session(const CliOptions& opt) {
    cf::Config cfg = cf::Config::from_file(opt.config_path);
    cf::Market market = cf::build_market(cfg);
    const std::size_t d = market.d;
    Session s{std::move(cfg),
              std::move(market),
              nullptr,
              {},
              {},
              1.0,
              5.0,
              100000,
              0,
              1,
              cf::Measure::pricing};
    s.carbon = cf::build_carbon(s.cfg, d);
    s.strategy = cf::build_strategy(s.cfg, d);
    s.mortality = cf::build_mortality(s.cfg);
    if (!opt.m_sign.empty()) {
        if (opt.m_sign == "minus")
            s.mortality.m_sign = -1;
        else if (opt.m_sign == "plus")
            s.mortality.m_sign = 1;
        else
            throw cf::ConfigError("--m-sign must be minus or plus");
    }
    s.x0 = s.cfg.get_double("simulation", "x0", 1.0);
    if (s.x0 <= 0.0) throw cf::ConfigError("[simulation] x0 must be positive");
    s.steps_per_year = s.cfg.get_double("simulation", "steps_per_year", 5.0);
    if (s.steps_per_year <= 0.0)
        throw cf::ConfigError("[simulation] steps_per_year must be positive");
    s.replications = opt.replications ? opt.replications
                                      : s.cfg.get_uint("simulation", "replications", 100000);
    s.seed = opt.seed_set ? opt.seed : s.cfg.get_uint("simulation", "seed", 20240001);
    s.threads = opt.threads ? opt.threads
                            : static_cast<unsigned>(s.cfg.get_uint("simulation", "threads", 0));
    if (s.threads == 0) s.threads = cf::default_thread_count();
    s.measure = cf::parse_measure(
        !opt.measure.empty() ? opt.measure : s.cfg.get("simulation", "measure", "pricing"));
    return s;
}

cf::SimGrid grid_for(const Session& s, double maturity) {
    const int n = static_cast<int>(std::lround(maturity * s.steps_per_year));
    if (n < 1) throw cf::ConfigError("maturity too short for the step density");
    return cf::SimGrid::make(maturity, n);
}

std::vector<cf::ContractKind> contract_kinds(const Session& s, const CliOptions& opt) {
    const std::string kind =
        !opt.contract.empty() ? opt.contract : s.cfg.get("contract", "kind", "pure-endowment");
    if (kind == "all")
        return {cf::ContractKind::pure_endowment, cf::ContractKind::term_insurance,
                cf::ContractKind::endowment_insurance};
    return {cf::parse_contract_kind(kind)};
}

// Stream sink: file when --out is given, stdout otherwise.
class OutStream {
  public:
    explicit OutStream(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw cf::ConfigError("cannot open output file: " + path);
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

cf::PriceReport run_price(const Session& s, const cf::Contract& contract, cf::SimGrid grid) {
    cf::PriceJob job;
    job.market = &s.market;
    job.strategy = &s.strategy;
    job.carbon = s.carbon.get();
    job.mortality = &s.mortality;
    job.contract = contract;
    job.x0 = s.x0;
    job.grid = grid;
    job.seed = s.seed;
    job.threads = s.threads;
    return cf::mc_price(job, s.replications);
}

int cmd_price(const CliOptions& opt) {
    Session s = open_session(opt);
    OutStream sink(opt.out);
    cf::CsvWriter csv(sink.get());
    cf::write_provenance(csv, s.seed, s.cfg.hash());
    csv.header({"contract", "maturity", "steps", "replications", "price", "std_error", "delta",
                "delta_std_error", "var_reduction_pct"});
    for (cf::ContractKind kind : contract_kinds(s, opt)) {
        const double maturity = s.cfg.get_double("contract", "maturity", 10.0);
        const cf::SimGrid grid = grid_for(s, maturity);
        const cf::Contract contract = cf::build_contract(s.cfg, kind, s.x0, s.market.r);
        const cf::PriceReport rep = run_price(s, contract, grid);
        csv.row({cf::to_string(kind), cf::csv_number(maturity), std::to_string(grid.N),
                 std::to_string(rep.n_replicates), cf::csv_number(rep.price),
                 cf::csv_number(rep.std_error), cf::csv_number(rep.delta),
                 cf::csv_number(rep.delta_se), cf::csv_number(rep.reduction_pct)});
    }
    return 0;
}

int cmd_var_report(const CliOptions& opt) {
    Session s = open_session(opt);
    cf::Vec maturities{5.0, 10.0, 20.0, 30.0};
    if (s.cfg.has("report", "maturities")) maturities = s.cfg.get_vec("report", "maturities");
    OutStream sink(opt.out);
    cf::CsvWriter csv(sink.get());
    cf::write_provenance(csv, s.seed, s.cfg.hash());
    csv.header({"contract", "T", "N", "M", "var_st", "var_vr", "reduction_pct", "price",
                "stderr"});
    const std::vector<cf::ContractKind> kinds{cf::ContractKind::pure_endowment,
                                              cf::ContractKind::term_insurance,
                                              cf::ContractKind::endowment_insurance};
    for (cf::ContractKind kind : kinds) {
        for (double maturity : maturities) {
            const cf::SimGrid grid = grid_for(s, maturity);
            const cf::Contract contract = cf::build_contract(s.cfg, kind, s.x0, s.market.r);
            cf::Contract adjusted = contract;
            adjusted.maturity = maturity;
            const cf::PriceReport rep = run_price(s, adjusted, grid);
            csv.row({cf::to_string(kind), cf::csv_number(maturity), std::to_string(grid.N),
                     std::to_string(rep.n_replicates), cf::csv_number(rep.var_st),
                     cf::csv_number(rep.var_vr), cf::csv_number(rep.reduction_pct),
                     cf::csv_number(rep.price), cf::csv_number(rep.std_error)});
        }
    }
    return 0;
}

std::vector<cf::HedgeStrategy> parse_strategies(const std::string& text) {
    std::vector<cf::HedgeStrategy> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        item = first == std::string::npos ? std::string() : item.substr(first, last - first + 1);
        if (item == "none")
            out.push_back(cf::HedgeStrategy::none);
        else if (item == "static")
            out.push_back(cf::HedgeStrategy::static_hedge);
        else if (item == "continuous")
            out.push_back(cf::HedgeStrategy::continuous);
        else
            throw cf::ConfigError("unknown hedge strategy '" + item +
                                  "' (use none, static, continuous)");
    }
    return out;
}

int cmd_hedge(const CliOptions& opt) {
    Session s = open_session(opt);
    const double maturity = s.cfg.get_double("contract", "maturity", 10.0);
    const cf::SimGrid grid = grid_for(s, maturity);

    cf::HedgeJob job;
    job.market = &s.market;
    job.strategy = &s.strategy;
    job.carbon = s.carbon.get();
    job.mortality = &s.mortality;
    job.x0 = s.x0;
    job.grid = grid;
    job.seed = s.seed;
    job.threads = s.threads;
    // The backtest runs under the physical measure unless overridden.
    job.measure = cf::parse_measure(
        !opt.measure.empty() ? opt.measure : s.cfg.get("hedging", "measure", "physical"));
    job.n_scenarios = s.cfg.get_uint("hedging", "scenarios", 2000);
    job.m_inner = s.cfg.get_uint("hedging", "m_inner", 256);
    job.premium_replicates = s.cfg.get_uint("hedging", "premium_replications", 1000000);
    job.portfolio.n_policies = s.cfg.get_uint("hedging", "policies", 1000);
    job.portfolio.age_low = static_cast<int>(s.cfg.get_int("hedging", "age_low", 60));
    job.portfolio.age_high = static_cast<int>(s.cfg.get_int("hedging", "age_high", 60));

    std::string kinds_text = s.cfg.get("hedging", "contracts", "");
    if (!opt.contract.empty()) kinds_text = opt.contract;
    std::vector<cf::ContractKind> kinds;
    if (kinds_text.empty() || kinds_text == "all") {
        kinds = {cf::ContractKind::pure_endowment, cf::ContractKind::term_insurance,
                 cf::ContractKind::endowment_insurance};
    } else {
        std::stringstream ss(kinds_text);
        std::string item;
        while (std::getline(ss, item, ',')) kinds.push_back(cf::parse_contract_kind(item));
    }
    for (cf::ContractKind kind : kinds)
        job.contracts.push_back(cf::build_contract(s.cfg, kind, s.x0, s.market.r));

    const std::vector<cf::HedgeStrategy> strategies =
        parse_strategies(s.cfg.get("hedging", "strategies", "none,static,continuous"));

    const cf::HedgeBatch batch = cf::simulate_hedge(job, strategies);

    const std::filesystem::path dir = opt.out.empty() ? "." : opt.out;
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "hedge_summary.csv", std::ios::binary);
        if (!f) throw cf::ConfigError("cannot write hedge_summary.csv");
        cf::CsvWriter csv(f);
        cf::write_provenance(csv, s.seed, s.cfg.hash());
        csv.header({"contract", "strategy", "n_policies", "scenarios", "mean", "std", "q05",
                    "q50", "q90", "q95"});
        for (const cf::HedgeCell& cell : batch.cells) {
            csv.row({cf::to_string(cell.contract), cf::to_string(cell.strategy),
                     std::to_string(job.portfolio.n_policies), std::to_string(job.n_scenarios),
                     cf::csv_number(cell.stats.mean), cf::csv_number(cell.stats.stddev),
                     cf::csv_number(cell.stats.q05), cf::csv_number(cell.stats.q50),
                     cf::csv_number(cell.stats.q90), cf::csv_number(cell.stats.q95)});
        }
    }
    {
        std::ofstream f(dir / "hedge_costs.csv", std::ios::binary);
        if (!f) throw cf::ConfigError("cannot write hedge_costs.csv");
        cf::CsvWriter csv(f);
        cf::write_provenance(csv, s.seed, s.cfg.hash());
        csv.header({"scenario_id", "contract", "strategy", "cost"});
        for (const cf::HedgeCell& cell : batch.cells)
            for (std::size_t i = 0; i < cell.costs.size(); ++i)
                csv.row({std::to_string(i), cf::to_string(cell.contract),
                         cf::to_string(cell.strategy), cf::csv_number(cell.costs[i])});
    }

    // Console recap.
    for (std::size_t ci = 0; ci < job.contracts.size(); ++ci)
        std::cout << "premium per policy, " << cf::to_string(job.contracts[ci].kind) << ": "
                  << cf::csv_number(batch.premium_per_policy[ci]) << "\n";
    for (const cf::HedgeCell& cell : batch.cells)
        std::cout << cf::to_string(cell.contract) << " / " << cf::to_string(cell.strategy)
                  << ": mean " << cf::csv_number(cell.stats.mean) << ", std "
                  << cf::csv_number(cell.stats.stddev) << "\n";
    return 0;
}

int cmd_value_function(const CliOptions& opt) {
    Session s = open_session(opt);
    const double horizon = s.cfg.get_double("contract", "maturity", 10.0);
    const cf::SimGrid grid = grid_for(s, horizon);
    OutStream sink(opt.out);
    cf::CsvWriter csv(sink.get());
    cf::write_provenance(csv, s.seed, s.cfg.hash());
    if (const auto* chain = dynamic_cast<const cf::ChainCarbon*>(s.carbon.get())) {
        const cf::ChainValueSolution sol =
            cf::solve_chain_value_odes(*chain, s.market, s.strategy, grid);
        csv.header({"t", "state", "phi", "value_at_x0"});
        for (int j = 0; j <= grid.N; ++j)
            for (std::size_t k = 0; k < sol.n_states; ++k)
                csv.row({cf::csv_number(grid.node(j)), std::to_string(k),
                         cf::csv_number(sol.at(j, k)),
                         cf::csv_number(cf::value_function_eval(s.strategy.delta, s.x0,
                                                                sol.at(j, k)))});
    } else {
        const cf::McEstimate est = cf::feynman_kac_phi(*s.carbon, 0.0, s.market, s.strategy,
                                                       grid, s.replications, s.seed, s.threads);
        csv.header({"t", "phi", "std_error", "value_at_x0"});
        csv.row({"0", cf::csv_number(est.value), cf::csv_number(est.std_error),
                 cf::csv_number(cf::value_function_eval(s.strategy.delta, s.x0, est.value))});
    }
    return 0;
}

int cmd_simulate(const CliOptions& opt) {
    Session s = open_session(opt);
    const double maturity = s.cfg.get_double("contract", "maturity", 10.0);
    const cf::SimGrid grid = grid_for(s, maturity);
    const std::size_t d = s.carbon->dim();
    OutStream sink(opt.out);
    cf::CsvWriter csv(sink.get());
    cf::write_provenance(csv, s.seed, s.cfg.hash());
    std::vector<std::string> head{"path", "t", "fund", "variance_rate", "v", "cash"};
    for (std::size_t i = 0; i < d; ++i) head.push_back("carbon_" + std::to_string(i + 1));
    for (std::size_t i = 0; i < s.market.d; ++i) head.push_back("pi_" + std::to_string(i + 1));
    csv.header(head);

    auto model = s.carbon->clone();
    cf::WeightSolver solver(s.market, s.strategy);
    for (std::size_t p = 0; p < opt.paths; ++p) {
        cf::Philox gc(s.seed, cf::stream_id(cf::StreamPurpose::carbon, p));
        const cf::CarbonGrid carbon = cf::simulate_carbon_grid(*model, grid.T, grid.N, gc);
        const cf::WeightPath w = cf::discretize_weights(carbon, grid, solver);
        cf::Philox gf(s.seed, cf::stream_id(cf::StreamPurpose::fund, p));
        const std::vector<double> fund = cf::simulate_fund_path(w, s.x0, s.market.r, s.measure, gf);
        for (int j = 0; j <= grid.N; ++j) {
            const double* pi = w.weights_at(j);
            std::vector<std::string> row{std::to_string(p), cf::csv_number(grid.node(j)),
                                         cf::csv_number(fund[static_cast<std::size_t>(j)]),
                                         cf::csv_number(w.s[static_cast<std::size_t>(j)]),
                                         cf::csv_number(w.v[static_cast<std::size_t>(j)]),
                                         cf::csv_number(cf::cash_weight(
                                             cf::Vec(pi, pi + s.market.d)))};
            const double* c = carbon.at(static_cast<std::size_t>(j));
            for (std::size_t i = 0; i < d; ++i) row.push_back(cf::csv_number(c[i]));
            for (std::size_t i = 0; i < s.market.d; ++i) row.push_back(cf::csv_number(pi[i]));
            csv.row(row);
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"carbon-penalized optimal fund: pricing, hedging and diagnostics"};
    app.set_version_flag("--version", std::string("fundtool ") + cf::kVersion);
    app.require_subcommand(1);

    CliOptions opt;
    // Shared options; registered per subcommand so help stays local.
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", opt.config_path, "configuration file")->required();
        cmd->add_option("-o,--out", opt.out, "output file (hedge: output directory)");
        cmd->add_option("--seed", opt.seed, "root seed override")
            ->each([&](const std::string&) { opt.seed_set = true; });
        cmd->add_option("--threads", opt.threads, "worker thread count override");
        cmd->add_option("--measure", opt.measure, "simulation measure: pricing or physical");
        cmd->add_option("--m-sign", opt.m_sign,
                        "sign of the modal-age shift in the mortality law: minus or plus");
    };

    CLI::App* price = app.add_subcommand("price", "price one contract kind (or all)");
    add_common(price);
    price->add_option("--contract", opt.contract,
                      "pure-endowment, term-insurance, endowment-insurance or all");
    price->add_option("--replications", opt.replications, "Monte Carlo replications override");

    CLI::App* report = app.add_subcommand(
        "var-report", "variance-reduction table across contracts and maturities");
    add_common(report);
    report->add_option("--replications", opt.replications, "Monte Carlo replications override");

    CLI::App* hedge = app.add_subcommand(
        "hedge", "backtest risk-minimizing, static and unhedged portfolios");
    add_common(hedge);
    hedge->add_option("--contract", opt.contract, "contract kinds to hedge (comma list or all)");

    CLI::App* value = app.add_subcommand(
        "value-function", "value factor: exact for chain carbon, Monte Carlo otherwise");
    add_common(value);
    value->add_option("--replications", opt.replications, "Monte Carlo replications override");

    CLI::App* simulate = app.add_subcommand("simulate", "dump simulated fund paths");
    add_common(simulate);
    simulate->add_option("--paths", opt.paths, "number of paths to dump");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(price)) return cmd_price(opt);
        if (app.got_subcommand(report)) return cmd_var_report(opt);
        if (app.got_subcommand(hedge)) return cmd_hedge(opt);
        if (app.got_subcommand(value)) return cmd_value_function(opt);
        if (app.got_subcommand(simulate)) return cmd_simulate(opt);
    } catch (const cf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const cf::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
