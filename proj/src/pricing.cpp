#include "carbonfund/pricing.hpp"

#include <cmath>
#include <string>

#include "carbonfund/parallel.hpp"
#include "carbonfund/stats.hpp"

namespace carbonfund {

double Contract::floor_at(double t) const { return floor0 * std::exp(floor_rate * t); }
double Contract::cap_at(double t) const { return cap0 * std::exp(cap_rate * t); }

Contract make_contract(ContractKind kind, double maturity, double x0, double r,
                       CapMultipliers caps, double age, double mix) {
    if (!(maturity > 0.0)) throw ConfigError("contract: maturity must be positive");
    if (!(x0 > 0.0)) throw ConfigError("contract: initial fund value must be positive");
    if (!(mix > 0.0 && mix <= 1.0)) throw ConfigError("contract: mix weight must lie in (0, 1]");
    if (age < 0.0) throw ConfigError("contract: age must be nonnegative");
    Contract c;
    c.kind = kind;
    c.maturity = maturity;
    c.age = age;
    c.mix = mix;
    c.floor0 = caps.floor_mult * x0;
    c.floor_rate = caps.floor_rate_mult * r;
    c.cap0 = caps.cap_mult * x0;
    c.cap_rate = caps.cap_rate_mult * r;
    if (c.floor0 < 0.0 || c.floor0 > c.cap0 || c.floor_rate > c.cap_rate)
        throw CapOrderViolation("contract: the floor must stay below the cap on [0, T]");
    return c;
}

double payoff_capped(double x, double k, double K) {
    if (k > K) throw CapOrderViolation("payoff: floor exceeds cap");
    return std::min(K, std::max(k, x));
}

AB ab_terms(double v, double y, double x0, double r, double t) {
    if (v <= 0.0)
        throw DegenerateVariance("ab terms: zero integrated variance, use the deterministic branch");
    if (!(y > 0.0 && x0 > 0.0)) throw NumericalError("ab terms: levels must be positive");
    const double sq = std::sqrt(v);
    const double a = (std::log(y / x0) - r * t + v / 2.0) / sq;
    return {a, a - sq};
}

double capped_conditional_mean(double v, double x, double r, double t, double k, double K) {
    const double grown = x * std::exp(r * t);
    if (v <= 0.0) return payoff_capped(grown, k, K);
    const AB lo = ab_terms(v, k, x, r, t);
    const AB hi = ab_terms(v, K, x, r, t);
    return k * norm_cdf(lo.a) + K * norm_cdf(-hi.a) + grown * (norm_cdf(hi.b) - norm_cdf(lo.b));
}

double capped_conditional_delta(double v, double x, double r, double t, double k, double K) {
    const double growth = std::exp(r * t);
    if (v <= 0.0) return k < x * growth && x * growth < K ? growth : 0.0;
    const AB lo = ab_terms(v, k, x, r, t);
    const AB hi = ab_terms(v, K, x, r, t);
    return growth * (norm_cdf(hi.b) - norm_cdf(lo.b));
}

double capped_conditional_sq_mean(double v, double x, double r, double t, double k, double K) {
    const double grown = x * std::exp(r * t);
    if (v <= 0.0) {
        const double p = payoff_capped(grown, k, K);
        return p * p;
    }
    const AB lo = ab_terms(v, k, x, r, t);
    const AB hi = ab_terms(v, K, x, r, t);
    const double sq = std::sqrt(v);
    // The squared middle branch shifts the Gaussian argument by a further
    // sqrt(v) and picks up the factor e^{v}.
    return k * k * norm_cdf(lo.a) + K * K * norm_cdf(-hi.a) +
           grown * grown * std::exp(v) * (norm_cdf(hi.b - sq) - norm_cdf(lo.b - sq));
}

namespace {

// One replicate's contributions, shared between mc_price and the tests.
struct Replicate {
    double st = 0.0;
    double vr = 0.0;
    double delta = 0.0;
    double gap = 0.0;
};

struct ReplicateWorker {
    const PriceJob& job;
    std::unique_ptr<CarbonModel> model;
    WeightSolver solver;
    CarbonGrid carbon;
    WeightPath weights;
    std::vector<double> fund;

    explicit ReplicateWorker(const PriceJob& j)
        : job(j), model(j.carbon->clone()), solver(*j.market, *j.strategy) {}

    Replicate run(std::size_t rep) {
        const SimGrid grid = job.grid;
        const Contract& c = job.contract;
        const Mortality& mort = *job.mortality;
        const double r = job.market->r;
        const double x0 = job.x0;
        const double T = grid.T;

        Philox gc(job.seed, stream_id(StreamPurpose::carbon, rep));
        carbon = simulate_carbon_grid(*model, T, grid.N, gc);
        weights = discretize_weights(carbon, grid, solver);

        Replicate out;
        const double sT = mort.survival(c.age, T);
        const double kT = c.floor_at(T);
        const double KT = c.cap_at(T);
        const double vN = weights.v[static_cast<std::size_t>(grid.N)];
        const double discT = std::exp(-r * T);

        // Death-cover leg: trapezoid over the grid of the discounted death
        // density times the (estimated or conditional-expected) payoff.
        double ti_st = 0.0, ti_vr = 0.0, ti_delta = 0.0;
        if (c.kind != ContractKind::pure_endowment) {
            Philox gf(job.seed, stream_id(StreamPurpose::fund, rep));
            fund = simulate_fund_path(weights, x0, r, Measure::pricing, gf);
            for (int j = 0; j <= grid.N; ++j) {
                const double t = grid.node(j);
                const double wj = grid.h * ((j == 0 || j == grid.N) ? 0.5 : 1.0);
                const double pj = mort.death_weight(c.age, t, r);
                const double kt = c.floor_at(t);
                const double Kt = c.cap_at(t);
                const double vj = weights.v[static_cast<std::size_t>(j)];
                ti_st += wj * pj * payoff_capped(fund[static_cast<std::size_t>(j)], kt, Kt);
                ti_vr += wj * pj * capped_conditional_mean(vj, x0, r, t, kt, Kt);
                ti_delta += wj * pj * capped_conditional_delta(vj, x0, r, t, kt, Kt);
            }
        }

        switch (c.kind) {
            case ContractKind::pure_endowment: {
                Philox gt(job.seed, stream_id(StreamPurpose::terminal, rep));
                const double xT = simulate_fund_terminal(weights, x0, r, gt);
                out.st = discT * sT * payoff_capped(xT, kT, KT);
                const double mean1 = capped_conditional_mean(vN, x0, r, T, kT, KT);
                out.vr = discT * sT * mean1;
                out.delta = discT * sT * capped_conditional_delta(vN, x0, r, T, kT, KT);
                const double mean2 = capped_conditional_sq_mean(vN, x0, r, T, kT, KT);
                out.gap = discT * discT * sT * sT * (mean2 - mean1 * mean1);
                break;
            }
            case ContractKind::term_insurance: {
                out.st = ti_st;
                out.vr = ti_vr;
                out.delta = ti_delta;
                break;
            }
            case ContractKind::endowment_insurance: {
                // Survival leg valued on the same fund path's terminal node so
                // the two legs stay consistent within the replicate.
                const double xT = fund[static_cast<std::size_t>(grid.N)];
                const double pe_st = discT * sT * payoff_capped(xT, kT, KT);
                const double pe_vr = discT * sT * capped_conditional_mean(vN, x0, r, T, kT, KT);
                const double pe_delta =
                    discT * sT * capped_conditional_delta(vN, x0, r, T, kT, KT);
                out.st = c.mix * ti_st + pe_st;
                out.vr = c.mix * ti_vr + pe_vr;
                out.delta = c.mix * ti_delta + pe_delta;
                break;
            }
        }
        return out;
    }
};

} // namespace

PriceReport mc_price(const PriceJob& job, std::size_t n_replicates) {
    if (n_replicates < 2) throw ConfigError("pricing: at least two replicates required");
    if (std::abs(job.contract.maturity - job.grid.T) > 1e-12)
        throw ConfigError("pricing: contract maturity and simulation horizon disagree");

    struct Partial {
        RunningStat st, vr, delta, gap, diff;
    };
    std::vector<Partial> partials(chunk_count(n_replicates, job.threads));
    parallel_chunks(n_replicates, job.threads,
                    [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                        ReplicateWorker worker(job);
                        Partial p;
                        for (std::size_t rep = begin; rep < end; ++rep) {
                            const Replicate s = worker.run(rep);
                            p.st.add(s.st);
                            p.vr.add(s.vr);
                            p.delta.add(s.delta);
                            p.gap.add(s.gap);
                            p.diff.add(s.st - s.vr);
                        }
                        partials[chunk] = p;
                    });

    Partial total;
    for (const Partial& p : partials) {
        total.st.merge(p.st);
        total.vr.merge(p.vr);
        total.delta.merge(p.delta);
        total.gap.merge(p.gap);
        total.diff.merge(p.diff);
    }

    PriceReport report;
    report.n_replicates = n_replicates;
    report.price = total.vr.mean;
    report.std_error = total.vr.std_error();
    report.mean_st = total.st.mean;
    report.se_st = total.st.std_error();
    report.var_vr = total.vr.variance();
    report.var_st = total.st.variance();
    report.reduction_pct =
        report.var_st > 0.0 ? 100.0 * (1.0 - report.var_vr / report.var_st) : 0.0;
    report.delta = total.delta.mean;
    report.delta_se = total.delta.std_error();
    report.mean_gap = total.gap.mean;
    report.mean_diff = total.diff.mean;
    report.se_diff = total.diff.std_error();
    return report;
}

} // namespace carbonfund
