#include "carbonfund/fund.hpp"

#include <cmath>

#include "carbonfund/errors.hpp"

namespace carbonfund {

SimGrid SimGrid::make(double T, int N) {
    if (!(T > 0.0)) throw ConfigError("grid: horizon must be positive");
    if (N < 1) throw ConfigError("grid: at least one step required");
    return {T, N, T / N};
}

int default_step_count(double T) {
    const int n = static_cast<int>(std::lround(5.0 * T));
    return n < 1 ? 1 : n;
}

WeightPath discretize_weights(const CarbonGrid& carbon, SimGrid grid, WeightSolver& solver) {
    WeightPath w;
    w.grid = grid;
    w.d = carbon.d;
    const auto nodes = static_cast<std::size_t>(grid.N) + 1;
    w.pi.resize(nodes * w.d);
    w.s.resize(nodes);
    w.v.resize(nodes);
    w.drift.resize(nodes);
    Vec c(w.d);
    for (std::size_t j = 0; j < nodes; ++j) {
        const double* row = carbon.at(j);
        for (std::size_t i = 0; i < w.d; ++i) c[i] = row[i];
        const Vec& pi = solver.solve(grid.node(static_cast<int>(j)), c);
        for (std::size_t i = 0; i < w.d; ++i) w.pi[j * w.d + i] = pi[i];
        w.s[j] = solver.variance_rate(pi);
        w.drift[j] = solver.drift_rate(pi);
    }
    w.v[0] = 0.0;
    for (std::size_t j = 1; j < nodes; ++j)
        w.v[j] = w.v[j - 1] + grid.h / 2.0 * (w.s[j - 1] + w.s[j]);
    return w;
}

std::vector<double> simulate_fund_path(const WeightPath& w, double x0, double r,
                                       Measure measure, Philox& g) {
    const int n = w.grid.N;
    const double h = w.grid.h;
    std::vector<double> x(static_cast<std::size_t>(n) + 1);
    x[0] = x0;
    for (int j = 0; j < n; ++j) {
        const double dv = h / 2.0 * (w.s[j] + w.s[j + 1]);
        double log_step = r * h - 0.5 * dv + std::sqrt(dv) * g.normal();
        if (measure == Measure::physical)
            log_step += h / 2.0 * (w.drift[j] + w.drift[j + 1]);
        x[static_cast<std::size_t>(j) + 1] = x[j] * std::exp(log_step);
    }
    return x;
}

double simulate_fund_terminal(const WeightPath& w, double x0, double r, Philox& g) {
    const double v = w.v[static_cast<std::size_t>(w.grid.N)];
    return x0 * std::exp(r * w.grid.T - 0.5 * v + std::sqrt(v) * g.normal());
}

} // namespace carbonfund
