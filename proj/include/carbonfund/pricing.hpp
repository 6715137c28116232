#pragma once

#include <cstdint>
#include <vector>

#include "carbonfund/carbon.hpp"
#include "carbonfund/errors.hpp"
#include "carbonfund/fund.hpp"
#include "carbonfund/market.hpp"
#include "carbonfund/mortality.hpp"
#include "carbonfund/strategy.hpp"

namespace carbonfund {

// The guaranteed floor exceeds the cap somewhere on [0, T].
struct CapOrderViolation : ConfigError {
    using ConfigError::ConfigError;
};

// Zero integrated variance reached a formula that needs v > 0; callers switch
// to the deterministic-payoff branch instead.
struct DegenerateVariance : NumericalError {
    using NumericalError::NumericalError;
};

enum class ContractKind { pure_endowment, term_insurance, endowment_insurance };

// Unit-linked contract paying the fund value clamped between a guaranteed
// floor and a cap, both growing exponentially in time. The pure endowment
// pays at maturity if the policyholder survives; the term insurance pays at
// death before maturity; the endowment package combines both with weight mix
// on the death cover.
struct Contract {
    ContractKind kind = ContractKind::pure_endowment;
    double maturity = 10.0;
    double age = 60.0;
    double mix = 1.0;
    double floor0 = 1.0;
    double floor_rate = 0.05;
    double cap0 = 1.0;
    double cap_rate = 0.5;

    double floor_at(double t) const;
    double cap_at(double t) const;
};

// Cap-shape knobs relative to the defaults floor(t) = x0 e^{rt} and
// cap(t) = x0 e^{10 r t}.
struct CapMultipliers {
    double floor_mult = 1.0;
    double floor_rate_mult = 1.0;
    double cap_mult = 1.0;
    double cap_rate_mult = 10.0;
};

Contract make_contract(ContractKind kind, double maturity, double x0, double r,
                       CapMultipliers caps = {}, double age = 60.0, double mix = 1.0);

// min(K, max(k, x)).
double payoff_capped(double x, double k, double K);

// Gaussian arguments of the conditional closed forms: given integrated
// variance v over [0, t], a(y) = (log(y/x0) - r t + v/2) / sqrt(v) and
// b = a - sqrt(v). Throws DegenerateVariance when v <= 0.
struct AB {
    double a;
    double b;
};
AB ab_terms(double v, double y, double x0, double r, double t);

// E[payoff_capped(X, k, K)] for X lognormal with mean x e^{rt} and log
// variance v; the v <= 0 branch returns the deterministic payoff.
double capped_conditional_mean(double v, double x, double r, double t, double k, double K);

// Derivative of capped_conditional_mean in x: e^{rt}(Phi(b_K) - Phi(b_k)),
// or the indicator branch e^{rt} 1{k < x e^{rt} < K} when v <= 0.
double capped_conditional_delta(double v, double x, double r, double t, double k, double K);

// E[payoff_capped(X, k, K)^2] under the same law (the variance-gap
// diagnostic needs the second moment).
double capped_conditional_sq_mean(double v, double x, double r, double t, double k, double K);

// Everything needed to price one contract by Monte Carlo.
struct PriceJob {
    const Market* market = nullptr;
    const StrategySpec* strategy = nullptr;
    const CarbonModel* carbon = nullptr;
    const Mortality* mortality = nullptr;
    Contract contract;
    double x0 = 1.0;
    SimGrid grid;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

// Sample moments of the two estimator flavors over shared weight paths.
// price/std_error describe the conditional closed-form flavor; the standard
// flavor draws the fund innovations on top of the same paths. delta is the
// pathwise derivative of the closed-form flavor in x0; mean_gap averages the
// analytic per-path variance gap (pure endowment only, else 0).
struct PriceReport {
    std::size_t n_replicates = 0;
    double price = 0.0;
    double std_error = 0.0;
    double mean_st = 0.0;
    double se_st = 0.0;
    double var_vr = 0.0;
    double var_st = 0.0;
    double reduction_pct = 0.0;
    double delta = 0.0;
    double delta_se = 0.0;
    double mean_gap = 0.0;
    // Paired per-replicate difference standard - conditional, whose mean is
    // zero in law; its own standard error is the right scale for equality
    // checks because the two flavors share the weight paths.
    double mean_diff = 0.0;
    double se_diff = 0.0;
};

PriceReport mc_price(const PriceJob& job, std::size_t n_replicates);

} // namespace carbonfund
