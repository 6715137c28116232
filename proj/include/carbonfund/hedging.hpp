#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carbonfund/carbon.hpp"
#include "carbonfund/fund.hpp"
#include "carbonfund/market.hpp"
#include "carbonfund/mortality.hpp"
#include "carbonfund/pricing.hpp"
#include "carbonfund/strategy.hpp"

namespace carbonfund {

enum class HedgeStrategy { none, static_hedge, continuous };

std::string to_string(HedgeStrategy s);
std::string to_string(ContractKind k);

// Policy portfolio: n policies whose integer ages cycle through
// [age_low, age_high], so the age mix is exactly uniform and reproducible.
// age_low == age_high gives the homogeneous case.
struct PortfolioSpec {
    std::size_t n_policies = 1000;
    int age_low = 60;
    int age_high = 60;
};

// Shared-scenario backtest of the hedging strategies on a policy portfolio.
// All contracts in the batch must share the maturity of the grid; they also
// share the simulated fund, the policyholder lifetimes, and the inner carbon
// sub-paths that feed the hedge ratios.
struct HedgeJob {
    const Market* market = nullptr;
    const StrategySpec* strategy = nullptr;
    const CarbonModel* carbon = nullptr;
    const Mortality* mortality = nullptr;
    std::vector<Contract> contracts;
    PortfolioSpec portfolio;
    double x0 = 1.0;
    SimGrid grid;
    Measure measure = Measure::physical;
    std::size_t n_scenarios = 2000;
    std::size_t m_inner = 256;
    std::size_t premium_replicates = 1'000'000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct CostStats {
    double mean = 0.0;
    double stddev = 0.0;
    double q05 = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
    double q95 = 0.0;
};

CostStats cost_stats(const std::vector<double>& samples);

// Cost distribution of one (contract, strategy) pair. Costs are per policy:
// (discounted benefits - premiums - trading gains) / n_policies.
struct HedgeCell {
    ContractKind contract = ContractKind::pure_endowment;
    HedgeStrategy strategy = HedgeStrategy::none;
    std::vector<double> costs;
    CostStats stats;
};

struct HedgeBatch {
    std::vector<double> premium_per_policy;  // one entry per job contract
    std::vector<HedgeCell> cells;            // contracts x strategies, row-major
};

HedgeBatch simulate_hedge(const HedgeJob& job, const std::vector<HedgeStrategy>& strategies);

} // namespace carbonfund
