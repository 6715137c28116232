#include "carbonfund/carbon.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "carbonfund/errors.hpp"

namespace carbonfund {

namespace {

void check_common(const Vec& c0, const Vec& cbar, const Vec& kappa, const Vec& lambda,
                  const char* name) {
    const std::size_t d = c0.size();
    if (d == 0) throw ConfigError(std::string(name) + ": at least one asset required");
    if (cbar.size() != d || kappa.size() != d || lambda.size() != d)
        throw ConfigError(std::string(name) + ": parameter vectors must share one length");
    for (std::size_t i = 0; i < d; ++i) {
        if (!(kappa[i] > 0.0))
            throw ConfigError(std::string(name) + ": mean-reversion speed must be positive");
        if (lambda[i] < 0.0)
            throw ConfigError(std::string(name) + ": volatility must be nonnegative");
    }
}

// (1 - e^{-k t}) / k, continuous at k = 0.
double psi(double k, double t) { return k == 0.0 ? t : -std::expm1(-k * t) / k; }

} // namespace

OuCarbon::OuCarbon(Vec c0, Vec cbar, Vec kappa, Vec lambda)
    : c0_(std::move(c0)), cbar_(std::move(cbar)), kappa_(std::move(kappa)),
      lambda_(std::move(lambda)) {
    check_common(c0_, cbar_, kappa_, lambda_, "carbon");
}

void OuCarbon::init(CarbonState& s, Philox&) const { s.c = c0_; }

void OuCarbon::step(double /*t*/, double h, CarbonState& s, Philox& g) {
    if (h != cached_h_) {
        decay_.resize(c0_.size());
        sd_.resize(c0_.size());
        for (std::size_t i = 0; i < c0_.size(); ++i) {
            decay_[i] = std::exp(-kappa_[i] * h);
            sd_[i] = lambda_[i] * std::sqrt((1.0 - decay_[i] * decay_[i]) / (2.0 * kappa_[i]));
        }
        cached_h_ = h;
    }
    for (std::size_t i = 0; i < c0_.size(); ++i)
        s.c[i] = cbar_[i] + (s.c[i] - cbar_[i]) * decay_[i] + sd_[i] * g.normal();
}

double square_root_step(double c, double kappa, double cbar, double lambda, double h, double g) {
    const double shift = (kappa * cbar - lambda * lambda / 4.0) * psi(kappa, h / 2.0);
    const double decay = std::exp(-kappa * h / 2.0);
    const double root = std::sqrt(shift + decay * c) + lambda / 2.0 * std::sqrt(h) * g;
    return shift + decay * root * root;
}

SquareRootCarbon::SquareRootCarbon(Vec c0, Vec cbar, Vec kappa, Vec lambda)
    : c0_(std::move(c0)), cbar_(std::move(cbar)), kappa_(std::move(kappa)),
      lambda_(std::move(lambda)) {
    check_common(c0_, cbar_, kappa_, lambda_, "carbon");
    for (std::size_t i = 0; i < c0_.size(); ++i) {
        if (c0_[i] < 0.0) throw ConfigError("carbon: square-root model needs c0 >= 0");
        if (lambda_[i] * lambda_[i] > 4.0 * kappa_[i] * cbar_[i])
            throw ConfigError("carbon: step scheme needs lambda^2 <= 4 kappa cbar (asset " +
                              std::to_string(i + 1) + ")");
    }
}

void SquareRootCarbon::init(CarbonState& s, Philox&) const { s.c = c0_; }

void SquareRootCarbon::step(double /*t*/, double h, CarbonState& s, Philox& g) {
    if (h != cached_h_) {
        shift_.resize(c0_.size());
        decay_.resize(c0_.size());
        for (std::size_t i = 0; i < c0_.size(); ++i) {
            shift_[i] = (kappa_[i] * cbar_[i] - lambda_[i] * lambda_[i] / 4.0) * psi(kappa_[i], h / 2.0);
            decay_[i] = std::exp(-kappa_[i] * h / 2.0);
        }
        cached_h_ = h;
    }
    const double sqh = std::sqrt(h);
    for (std::size_t i = 0; i < c0_.size(); ++i) {
        const double root = std::sqrt(shift_[i] + decay_[i] * s.c[i]) + lambda_[i] / 2.0 * sqh * g.normal();
        s.c[i] = shift_[i] + decay_[i] * root * root;
    }
}

ExpOuCarbon::ExpOuCarbon(Vec c0, Vec log_mean, Vec kappa, Vec lambda)
    : c0_(std::move(c0)), log_mean_(std::move(log_mean)), kappa_(std::move(kappa)),
      lambda_(std::move(lambda)) {
    check_common(c0_, log_mean_, kappa_, lambda_, "carbon");
    for (double c : c0_)
        if (!(c > 0.0)) throw ConfigError("carbon: exponential model needs c0 > 0");
}

void ExpOuCarbon::init(CarbonState& s, Philox&) const { s.c = c0_; }

void ExpOuCarbon::step(double /*t*/, double h, CarbonState& s, Philox& g) {
    if (h != cached_h_) {
        decay_.resize(c0_.size());
        sd_.resize(c0_.size());
        for (std::size_t i = 0; i < c0_.size(); ++i) {
            decay_[i] = std::exp(-kappa_[i] * h);
            sd_[i] = lambda_[i] * std::sqrt((1.0 - decay_[i] * decay_[i]) / (2.0 * kappa_[i]));
        }
        cached_h_ = h;
    }
    for (std::size_t i = 0; i < c0_.size(); ++i) {
        const double y = log_mean_[i] + (std::log(s.c[i]) - log_mean_[i]) * decay_[i] + sd_[i] * g.normal();
        s.c[i] = std::exp(y);
    }
}

ChainCarbon::ChainCarbon(std::vector<Vec> states, Mat q, Vec initial_dist)
    : states_(std::move(states)), q_(std::move(q)), initial_dist_(std::move(initial_dist)) {
    const std::size_t k = states_.size();
    if (k == 0) throw ConfigError("carbon: chain needs at least one regime");
    const std::size_t d = states_[0].size();
    if (d == 0) throw ConfigError("carbon: chain regimes need at least one asset");
    for (const Vec& s : states_)
        if (s.size() != d) throw ConfigError("carbon: chain regimes must share one dimension");
    if (q_.n != k) throw ConfigError("carbon: generator size must match the regime count");
    for (std::size_t i = 0; i < k; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (i != j && q_(i, j) < 0.0)
                throw ConfigError("carbon: off-diagonal generator rates must be nonnegative");
            row += q_(i, j);
        }
        if (std::abs(row) > 1e-12) throw ConfigError("carbon: generator rows must sum to zero");
    }
    if (initial_dist_.size() != k)
        throw ConfigError("carbon: initial distribution size must match the regime count");
    double total = 0.0;
    for (double p : initial_dist_) {
        if (p < 0.0) throw ConfigError("carbon: initial distribution must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ConfigError("carbon: initial distribution must sum to one");
}

void ChainCarbon::init(CarbonState& s, Philox& g) const {
    const double u = g.uniform();
    double acc = 0.0;
    int k = static_cast<int>(states_.size()) - 1;
    for (std::size_t i = 0; i < states_.size(); ++i) {
        acc += initial_dist_[i];
        if (u <= acc) {
            k = static_cast<int>(i);
            break;
        }
    }
    s.regime = k;
    s.c = states_[static_cast<std::size_t>(k)];
}

double ChainCarbon::sojourn_time(int k, Philox& g) const {
    const double rate = -q_(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log(g.uniform()) / rate;
}

int ChainCarbon::jump_target(int k, Philox& g) const {
    const auto kk = static_cast<std::size_t>(k);
    const double rate = -q_(kk, kk);
    const double u = g.uniform() * rate;
    double acc = 0.0;
    int last = k;
    for (std::size_t l = 0; l < q_.n; ++l) {
        if (l == kk) continue;
        acc += q_(kk, l);
        last = static_cast<int>(l);
        if (u <= acc) return last;
    }
    return last;
}

void ChainCarbon::step(double /*t*/, double h, CarbonState& s, Philox& g) {
    double remaining = h;
    while (true) {
        const double wait = sojourn_time(s.regime, g);
        if (wait >= remaining) break;
        remaining -= wait;
        s.regime = jump_target(s.regime, g);
    }
    s.c = states_[static_cast<std::size_t>(s.regime)];
}

Moments square_root_moments(double c0, double cbar, double kappa, double lambda, double t) {
    const double e1 = std::exp(-kappa * t);
    const double mean = cbar + (c0 - cbar) * e1;
    const double var = c0 * lambda * lambda / kappa * (e1 - e1 * e1) +
                       cbar * lambda * lambda / (2.0 * kappa) * (1.0 - e1) * (1.0 - e1);
    return {mean, var};
}

Moments ou_moments(double c0, double cbar, double kappa, double lambda, double t) {
    const double e1 = std::exp(-kappa * t);
    const double mean = cbar + (c0 - cbar) * e1;
    const double var = lambda * lambda * (1.0 - e1 * e1) / (2.0 * kappa);
    return {mean, var};
}

CarbonGrid simulate_carbon_grid(CarbonModel& model, double T, int n_steps, Philox& g) {
    const double h = T / n_steps;
    CarbonGrid grid;
    grid.d = model.dim();
    grid.values.resize(static_cast<std::size_t>(n_steps + 1) * grid.d);
    CarbonState s;
    model.init(s, g);
    for (std::size_t i = 0; i < grid.d; ++i) grid.values[i] = s.c[i];
    for (int j = 0; j < n_steps; ++j) {
        model.step(j * h, h, s, g);
        double* row = grid.at(static_cast<std::size_t>(j) + 1);
        for (std::size_t i = 0; i < grid.d; ++i) row[i] = s.c[i];
    }
    return grid;
}

} // namespace carbonfund
