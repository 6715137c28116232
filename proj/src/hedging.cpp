#include "carbonfund/hedging.hpp"

#include <algorithm>
#include <cmath>

#include "carbonfund/parallel.hpp"
#include "carbonfund/stats.hpp"

namespace carbonfund {

std::string to_string(HedgeStrategy s) {
    switch (s) {
        case HedgeStrategy::none: return "none";
        case HedgeStrategy::static_hedge: return "static";
        case HedgeStrategy::continuous: return "continuous";
    }
    return "?";
}

std::string to_string(ContractKind k) {
    switch (k) {
        case ContractKind::pure_endowment: return "pure-endowment";
        case ContractKind::term_insurance: return "term-insurance";
        case ContractKind::endowment_insurance: return "endowment-insurance";
    }
    return "?";
}

CostStats cost_stats(const std::vector<double>& samples) {
    if (samples.size() < 2) throw ConfigError("hedge statistics need at least two samples");
    RunningStat rs;
    for (double x : samples) rs.add(x);
    CostStats st;
    st.mean = rs.mean;
    st.stddev = rs.stddev();
    st.q05 = sample_quantile(samples, 0.05);
    st.q50 = sample_quantile(samples, 0.50);
    st.q90 = sample_quantile(samples, 0.90);
    st.q95 = sample_quantile(samples, 0.95);
    return st;
}

namespace {

struct AgeGroups {
    std::vector<int> ages;                    // distinct integer ages
    std::vector<std::size_t> policy_age;      // per policy, index into ages
    std::vector<double> count;                // policies per age
};

AgeGroups build_portfolio(const PortfolioSpec& p) {
    if (p.n_policies == 0) throw ConfigError("hedging: at least one policy required");
    if (p.age_low > p.age_high) throw ConfigError("hedging: age range is inverted");
    AgeGroups g;
    const int span = p.age_high - p.age_low + 1;
    for (int a = p.age_low; a <= p.age_high; ++a) g.ages.push_back(a);
    g.count.assign(g.ages.size(), 0.0);
    g.policy_age.resize(p.n_policies);
    // Ages cycle through the range so the mix is exactly uniform.
    for (std::size_t i = 0; i < p.n_policies; ++i) {
        const auto idx = static_cast<std::size_t>(i % static_cast<std::size_t>(span));
        g.policy_age[i] = idx;
        g.count[idx] += 1.0;
    }
    return g;
}

// Survival and hazard tables per age group on the grid nodes.
struct MortalityTables {
    std::size_t n_ages = 0;
    int n_nodes = 0;
    std::vector<double> survival;   // age x node
    std::vector<double> intensity;  // age x node

    double s(std::size_t a, int j) const {
        return survival[a * static_cast<std::size_t>(n_nodes) + static_cast<std::size_t>(j)];
    }
    double gamma(std::size_t a, int j) const {
        return intensity[a * static_cast<std::size_t>(n_nodes) + static_cast<std::size_t>(j)];
    }
};

MortalityTables build_tables(const Mortality& mort, const AgeGroups& groups, SimGrid grid) {
    MortalityTables t;
    t.n_ages = groups.ages.size();
    t.n_nodes = grid.N + 1;
    t.survival.resize(t.n_ages * static_cast<std::size_t>(t.n_nodes));
    t.intensity.resize(t.n_ages * static_cast<std::size_t>(t.n_nodes));
    for (std::size_t a = 0; a < t.n_ages; ++a) {
        for (int j = 0; j <= grid.N; ++j) {
            const double tt = grid.node(j);
            const auto idx = a * static_cast<std::size_t>(t.n_nodes) + static_cast<std::size_t>(j);
            t.survival[idx] = mort.survival(groups.ages[a], tt);
            t.intensity[idx] = mort.intensity(groups.ages[a], tt);
        }
    }
    return t;
}

// Phi(b(K)) - Phi(b(k)) at the remaining horizon, the hedge ratio's
// conditional building block; the degenerate branch mirrors the pricing one.
double phi_difference(double v, double x, double r, double tau, double k, double K) {
    const double growth = std::exp(r * tau);
    if (v <= 0.0) return k < x * growth && x * growth < K ? 1.0 : 0.0;
    const double sq = std::sqrt(v);
    const double bk = (std::log(k / x) - r * tau + v / 2.0) / sq - sq;
    const double bK = (std::log(K / x) - r * tau + v / 2.0) / sq - sq;
    return norm_cdf(bK) - norm_cdf(bk);
}

// Expected conditional payoff means per grid node under fresh carbon paths,
// the ingredient of every premium (the survival weights factor out per age).
std::vector<double> premium_mean_payoffs(const HedgeJob& job, const Contract& contract) {
    const SimGrid grid = job.grid;
    const double r = job.market->r;
    const std::uint64_t seed = derive_seed(job.seed, 17);
    std::vector<std::vector<double>> partial_sums(chunk_count(job.premium_replicates, job.threads));
    parallel_chunks(
        job.premium_replicates, job.threads,
        [&](std::size_t chunk, std::size_t begin, std::size_t end) {
            auto model = job.carbon->clone();
            WeightSolver solver(*job.market, *job.strategy);
            std::vector<double> sums(static_cast<std::size_t>(grid.N) + 1, 0.0);
            for (std::size_t rep = begin; rep < end; ++rep) {
                Philox gc(seed, stream_id(StreamPurpose::premium, rep));
                const CarbonGrid carbon = simulate_carbon_grid(*model, grid.T, grid.N, gc);
                const WeightPath w = discretize_weights(carbon, grid, solver);
                for (int j = 0; j <= grid.N; ++j) {
                    const double t = grid.node(j);
                    sums[static_cast<std::size_t>(j)] += capped_conditional_mean(
                        w.v[static_cast<std::size_t>(j)], job.x0, r, t, contract.floor_at(t),
                        contract.cap_at(t));
                }
            }
            partial_sums[chunk] = std::move(sums);
        });
    std::vector<double> mean(static_cast<std::size_t>(grid.N) + 1, 0.0);
    for (const auto& sums : partial_sums)
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += sums[j];
    for (double& x : mean) x /= static_cast<double>(job.premium_replicates);
    return mean;
}

double premium_for_age(const HedgeJob& job, const Contract& c, const MortalityTables& tables,
                       std::size_t age_idx, const std::vector<double>& mean_payoff) {
    const SimGrid grid = job.grid;
    const double r = job.market->r;
    const double sT = tables.s(age_idx, grid.N);
    const double pe = std::exp(-r * grid.T) * sT * mean_payoff[static_cast<std::size_t>(grid.N)];
    if (c.kind == ContractKind::pure_endowment) return pe;
    double ti = 0.0;
    for (int j = 0; j <= grid.N; ++j) {
        const double wj = grid.h * ((j == 0 || j == grid.N) ? 0.5 : 1.0);
        const double pj =
            std::exp(-r * grid.node(j)) * tables.s(age_idx, j) * tables.gamma(age_idx, j);
        ti += wj * pj * mean_payoff[static_cast<std::size_t>(j)];
    }
    if (c.kind == ContractKind::term_insurance) return ti;
    return c.mix * ti + pe;
}

} // namespace

HedgeBatch simulate_hedge(const HedgeJob& job, const std::vector<HedgeStrategy>& strategies) {
    if (job.contracts.empty()) throw ConfigError("hedging: at least one contract required");
    if (strategies.empty()) throw ConfigError("hedging: at least one strategy required");
    if (job.n_scenarios < 2) throw ConfigError("hedging: at least two scenarios required");
    if (job.m_inner < 1) throw ConfigError("hedging: inner sample size must be positive");
    for (const Contract& c : job.contracts) {
        if (std::abs(c.maturity - job.grid.T) > 1e-12)
            throw ConfigError("hedging: contract maturity and simulation horizon disagree");
        const Contract& f = job.contracts.front();
        if (c.floor0 != f.floor0 || c.floor_rate != f.floor_rate || c.cap0 != f.cap0 ||
            c.cap_rate != f.cap_rate)
            throw ConfigError("hedging: batched contracts must share the floor and cap functions");
    }
    if (static_cast<double>(job.grid.N) * static_cast<double>(job.m_inner) >= 16777216.0)
        throw ConfigError("hedging: grid times inner sample size exceeds the stream budget");

    const SimGrid grid = job.grid;
    const int n = grid.N;
    const double r = job.market->r;
    const std::size_t n_contracts = job.contracts.size();
    const AgeGroups groups = build_portfolio(job.portfolio);
    const MortalityTables tables = build_tables(*job.mortality, groups, grid);
    const std::size_t n_ages = groups.ages.size();

    const bool want_continuous =
        std::find(strategies.begin(), strategies.end(), HedgeStrategy::continuous) !=
        strategies.end();
    const bool want_static =
        std::find(strategies.begin(), strategies.end(), HedgeStrategy::static_hedge) !=
        strategies.end();
    const bool need_ratios = want_continuous || want_static;

    // Premiums: one fresh-path run shared by all contracts (they share the
    // caps), then survival weights per age and contract.
    std::vector<double> premium_total(n_contracts, 0.0);
    HedgeBatch batch;
    batch.premium_per_policy.resize(n_contracts);
    {
        const std::vector<double> mean_payoff = premium_mean_payoffs(job, job.contracts.front());
        for (std::size_t ci = 0; ci < n_contracts; ++ci) {
            double total = 0.0;
            for (std::size_t a = 0; a < n_ages; ++a)
                total += groups.count[a] *
                         premium_for_age(job, job.contracts[ci], tables, a, mean_payoff);
            premium_total[ci] = total;
            batch.premium_per_policy[ci] = total / static_cast<double>(job.portfolio.n_policies);
        }
    }

    // costs[contract][strategy][scenario], written by scenario index so the
    // result does not depend on the thread count.
    std::vector<std::vector<std::vector<double>>> costs(
        n_contracts, std::vector<std::vector<double>>(strategies.size(),
                                                      std::vector<double>(job.n_scenarios)));

    parallel_chunks(job.n_scenarios, job.threads, [&](std::size_t, std::size_t begin,
                                                      std::size_t end) {
        auto model = job.carbon->clone();
        auto inner_model = job.carbon->clone();
        WeightSolver solver(*job.market, *job.strategy);
        const std::size_t d = job.carbon->dim();
        Vec c_state(d);
        CarbonState inner_state;
        std::vector<double> phi_mean(static_cast<std::size_t>(n) + 1);
        std::vector<double> alive(n_ages * static_cast<std::size_t>(n + 1));
        std::vector<double> deaths_at(static_cast<std::size_t>(n) + 1);
        std::vector<std::vector<double>> ratios(
            n_contracts, std::vector<double>(static_cast<std::size_t>(n), 0.0));

        for (std::size_t sc = begin; sc < end; ++sc) {
            Philox gc(job.seed, stream_id(StreamPurpose::carbon, sc));
            const CarbonGrid carbon = simulate_carbon_grid(*model, grid.T, n, gc);
            const WeightPath weights = discretize_weights(carbon, grid, solver);
            Philox gf(job.seed, stream_id(StreamPurpose::fund, sc));
            const std::vector<double> fund = simulate_fund_path(weights, job.x0, r, job.measure, gf);

            // Lifetimes: death in (t_{j-1}, t_j] pays at node j; survivors
            // past T get the sentinel node N+1.
            Philox gl(job.seed, stream_id(StreamPurpose::lifetime, sc));
            std::fill(alive.begin(), alive.end(), 0.0);
            std::fill(deaths_at.begin(), deaths_at.end(), 0.0);
            for (std::size_t i = 0; i < job.portfolio.n_policies; ++i) {
                const double tau =
                    job.mortality->sample_lifetime(groups.ages[groups.policy_age[i]], gl);
                std::size_t node;
                if (tau > grid.T) {
                    node = static_cast<std::size_t>(n) + 1;
                } else {
                    node = static_cast<std::size_t>(std::ceil(tau / grid.h));
                    if (node < 1) node = 1;
                    if (node > static_cast<std::size_t>(n)) node = static_cast<std::size_t>(n);
                    deaths_at[node] += 1.0;
                }
                // alive at node j while the death node lies beyond j
                const std::size_t last_alive = std::min(node - 1, static_cast<std::size_t>(n));
                for (std::size_t j = 0; j <= last_alive; ++j)
                    alive[groups.policy_age[i] * static_cast<std::size_t>(n + 1) + j] += 1.0;
            }

            // Hedge ratios per rebalance node: inner carbon sub-paths started
            // at the outer state give the conditional Phi-differences per
            // remaining horizon; survival weights then aggregate per age.
            const int last_ratio_node = want_continuous ? n - 1 : 0;
            if (need_ratios) {
                for (int j = 0; j <= last_ratio_node; ++j) {
                    const double tj = grid.node(j);
                    const double xj = fund[static_cast<std::size_t>(j)];
                    std::fill(phi_mean.begin() + j, phi_mean.end(), 0.0);
                    for (std::size_t m = 0; m < job.m_inner; ++m) {
                        Philox gi(job.seed,
                                  stream_id(StreamPurpose::subpath, sc,
                                            static_cast<std::uint64_t>(j) * job.m_inner + m));
                        const double* row = carbon.at(static_cast<std::size_t>(j));
                        inner_state.c.assign(row, row + d);
                        inner_state.regime = -1;
                        double s_prev = weights.s[static_cast<std::size_t>(j)];
                        double v_run = 0.0;
                        for (int u = j + 1; u <= n; ++u) {
                            inner_model->step(grid.node(u - 1), grid.h, inner_state, gi);
                            const Vec& pi = solver.solve(grid.node(u), inner_state.c);
                            const double s_u = solver.variance_rate(pi);
                            v_run += grid.h / 2.0 * (s_prev + s_u);
                            s_prev = s_u;
                            // accumulate against every contract's caps below;
                            // here the caps of the first contract stand in for
                            // all of them (validated identical at entry)
                            const double tu = grid.node(u);
                            phi_mean[static_cast<std::size_t>(u)] += phi_difference(
                                v_run, xj, r, tu - tj, job.contracts[0].floor_at(tu),
                                job.contracts[0].cap_at(tu));
                        }
                    }
                    for (int u = j + 1; u <= n; ++u)
                        phi_mean[static_cast<std::size_t>(u)] /= static_cast<double>(job.m_inner);
                    // the zero-horizon endpoint is deterministic
                    phi_mean[static_cast<std::size_t>(j)] = phi_difference(
                        0.0, xj, r, 0.0, job.contracts[0].floor_at(tj), job.contracts[0].cap_at(tj));

                    for (std::size_t ci = 0; ci < n_contracts; ++ci) {
                        const Contract& c = job.contracts[ci];
                        double ratio = 0.0;
                        for (std::size_t a = 0; a < n_ages; ++a) {
                            const double n_alive =
                                alive[a * static_cast<std::size_t>(n + 1) +
                                      static_cast<std::size_t>(j)];
                            if (n_alive == 0.0) continue;
                            const double s_now = tables.s(a, j);
                            double per_policy = 0.0;
                            if (c.kind != ContractKind::term_insurance)
                                per_policy += tables.s(a, n) / s_now *
                                              phi_mean[static_cast<std::size_t>(n)];
                            if (c.kind != ContractKind::pure_endowment) {
                                double ti = 0.0;
                                for (int u = j; u <= n; ++u) {
                                    const double wu = grid.h * ((u == j || u == n) ? 0.5 : 1.0);
                                    ti += wu * tables.s(a, u) * tables.gamma(a, u) *
                                          phi_mean[static_cast<std::size_t>(u)];
                                }
                                const double ti_ratio = ti / s_now;
                                per_policy += (c.kind == ContractKind::endowment_insurance
                                                   ? c.mix * ti_ratio
                                                   : ti_ratio);
                            }
                            ratio += n_alive * per_policy;
                        }
                        ratios[ci][static_cast<std::size_t>(j)] = ratio;
                    }
                }
            }

            // Discounted benefits and trading gains per contract.
            for (std::size_t ci = 0; ci < n_contracts; ++ci) {
                const Contract& c = job.contracts[ci];
                double benefits = 0.0;
                double alive_T = 0.0;
                for (std::size_t a = 0; a < n_ages; ++a)
                    alive_T += alive[a * static_cast<std::size_t>(n + 1) +
                                     static_cast<std::size_t>(n)];
                const double pe_ben =
                    std::exp(-r * grid.T) *
                    payoff_capped(fund[static_cast<std::size_t>(n)], c.floor_at(grid.T),
                                  c.cap_at(grid.T)) *
                    alive_T;
                double ti_ben = 0.0;
                for (int j = 1; j <= n; ++j) {
                    if (deaths_at[static_cast<std::size_t>(j)] == 0.0) continue;
                    const double t = grid.node(j);
                    ti_ben += deaths_at[static_cast<std::size_t>(j)] * std::exp(-r * t) *
                              payoff_capped(fund[static_cast<std::size_t>(j)], c.floor_at(t),
                                            c.cap_at(t));
                }
                switch (c.kind) {
                    case ContractKind::pure_endowment: benefits = pe_ben; break;
                    case ContractKind::term_insurance: benefits = ti_ben; break;
                    case ContractKind::endowment_insurance:
                        benefits = c.mix * ti_ben + pe_ben;
                        break;
                }

                for (std::size_t si = 0; si < strategies.size(); ++si) {
                    double gains = 0.0;
                    if (strategies[si] == HedgeStrategy::continuous) {
                        for (int j = 0; j < n; ++j) {
                            const double y0 = std::exp(-r * grid.node(j)) *
                                              fund[static_cast<std::size_t>(j)];
                            const double y1 = std::exp(-r * grid.node(j + 1)) *
                                              fund[static_cast<std::size_t>(j) + 1];
                            gains += ratios[ci][static_cast<std::size_t>(j)] * (y1 - y0);
                        }
                    } else if (strategies[si] == HedgeStrategy::static_hedge) {
                        const double y0 = job.x0;
                        const double yN =
                            std::exp(-r * grid.T) * fund[static_cast<std::size_t>(n)];
                        gains = ratios[ci][0] * (yN - y0);
                    }
                    costs[ci][si][sc] = (benefits - premium_total[ci] - gains) /
                                        static_cast<double>(job.portfolio.n_policies);
                }
            }
        }
    });

    for (std::size_t ci = 0; ci < n_contracts; ++ci) {
        for (std::size_t si = 0; si < strategies.size(); ++si) {
            HedgeCell cell;
            cell.contract = job.contracts[ci].kind;
            cell.strategy = strategies[si];
            cell.costs = std::move(costs[ci][si]);
            cell.stats = cost_stats(cell.costs);
            batch.cells.push_back(std::move(cell));
        }
    }
    return batch;
}

} // namespace carbonfund
