#include "doctest.h"

#include <cmath>
#include <limits>

#include "carbonfund/carbon.hpp"
#include "carbonfund/errors.hpp"
#include "reference_values.hpp"

using namespace carbonfund;

namespace {

const Vec bench_c0{5000.0, 4000.0, 3000.0, 1000.0};
const Vec bench_cbar{2500.0, 2000.0, 1500.0, 500.0};
const Vec bench_kappa{0.05, 0.05, 0.05, 0.05};
const Vec bench_lambda{3.0, 3.0, 3.0, 3.0};

// light accumulator to keep this file self-contained
struct Acc {
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    void add(double x) {
        sum += x;
        sq += x * x;
        ++n;
    }
    double mean() const { return sum / static_cast<double>(n); }
    double var() const {
        const double m = mean();
        return (sq / static_cast<double>(n) - m * m) * static_cast<double>(n) /
               static_cast<double>(n - 1);
    }
};

} // namespace

TEST_CASE("one square-root step matches the frozen golden value") {
    CHECK(square_root_step(5000.0, 0.05, 2500.0, 3.0, 1.0 / 12.0, 0.5) ==
          doctest::Approx(refvals::nv_step_golden).epsilon(1e-14));
}

TEST_CASE("square-root transition moments match the frozen values") {
    const Moments a = square_root_moments(5000.0, 2500.0, 0.05, 3.0, 20.0);
    CHECK(a.mean == doctest::Approx(refvals::cir_mean_a).epsilon(1e-12));
    CHECK(a.variance == doctest::Approx(refvals::cir_var_a).epsilon(1e-12));
    const Moments b = square_root_moments(1000.0, 500.0, 0.05, 3.0, 5.0);
    CHECK(b.mean == doctest::Approx(refvals::cir_mean_b).epsilon(1e-12));
    CHECK(b.variance == doctest::Approx(refvals::cir_var_b).epsilon(1e-12));
}

TEST_CASE("mean-reverting gaussian moments match the frozen values") {
    const Moments m = ou_moments(5000.0, 2500.0, 0.05, 3.0, 1.0);
    CHECK(m.mean == doctest::Approx(refvals::ou_mean).epsilon(1e-12));
    CHECK(m.variance == doctest::Approx(refvals::ou_var).epsilon(1e-12));
}

TEST_CASE("square-root model validity condition") {
    // lambda^2 <= 4 kappa cbar keeps the scheme's bracket nonnegative
    CHECK_THROWS_AS(SquareRootCarbon({100.0}, {100.0}, {0.1}, {7.0}), ConfigError);
    CHECK_NOTHROW(SquareRootCarbon({100.0}, {100.0}, {0.1}, {6.3}));
    // boundary case allowed; sqrt(40)^2 rounds one ulp above 40, so step just
    // inside the representable boundary
    CHECK_NOTHROW(SquareRootCarbon({100.0}, {100.0}, {0.1},
                                   {std::nextafter(std::sqrt(4.0 * 0.1 * 100.0), 0.0)}));
}

TEST_CASE("square-root paths stay nonnegative at the validity boundary") {
    const double kappa = 0.3, cbar = 50.0;
    const double lambda = std::nextafter(std::sqrt(4.0 * kappa * cbar), 0.0);
    SquareRootCarbon model({1.0}, {cbar}, {kappa}, {lambda});
    Philox g(77, stream_id(StreamPurpose::scratch, 21));
    CarbonState s;
    model.init(s, g);
    double mn = s.c[0];
    for (int j = 0; j < 4000; ++j) {
        model.step(0.25 * j, 0.25, s, g);
        mn = std::min(mn, s.c[0]);
    }
    CHECK(mn >= 0.0);
}

TEST_CASE("gaussian model is left unclamped") {
    OuCarbon model({0.0}, {0.0}, {0.5}, {10.0});
    Philox g(78, stream_id(StreamPurpose::scratch, 22));
    CarbonState s;
    model.init(s, g);
    double mn = 0.0;
    for (int j = 0; j < 200; ++j) {
        model.step(0.1 * j, 0.1, s, g);
        mn = std::min(mn, s.c[0]);
    }
    CHECK(mn < 0.0);
}

TEST_CASE("grid simulation reproduces the transition moments") {
    // one-year horizon, 20 steps, all four benchmark assets
    const int n_paths = 20000;
    SquareRootCarbon model(bench_c0, bench_cbar, bench_kappa, bench_lambda);
    std::vector<Acc> acc(4);
    for (int p = 0; p < n_paths; ++p) {
        Philox g(555, stream_id(StreamPurpose::carbon, static_cast<std::uint64_t>(p)));
        const CarbonGrid grid = simulate_carbon_grid(model, 1.0, 20, g);
        for (std::size_t i = 0; i < 4; ++i) acc[i].add(grid.at(20)[i]);
    }
    for (std::size_t i = 0; i < 4; ++i) {
        const Moments ex = square_root_moments(bench_c0[i], bench_cbar[i], 0.05, 3.0, 1.0);
        const double se_mean = std::sqrt(acc[i].var() / n_paths);
        CHECK(std::abs(acc[i].mean() - ex.mean) < 4.0 * se_mean);
        // standard error of the sample variance via the normal approximation
        const double se_var = acc[i].var() * std::sqrt(2.0 / (n_paths - 1));
        CHECK(std::abs(acc[i].var() - ex.variance) < 5.0 * se_var);
    }
}

TEST_CASE("gaussian grid simulation is exact in law") {
    OuCarbon model({5000.0}, {2500.0}, {0.05}, {3.0});
    const int n_paths = 20000;
    Acc acc;
    for (int p = 0; p < n_paths; ++p) {
        Philox g(556, stream_id(StreamPurpose::carbon, static_cast<std::uint64_t>(p)));
        const CarbonGrid grid = simulate_carbon_grid(model, 1.0, 4, g);
        acc.add(grid.at(4)[0]);
    }
    CHECK(std::abs(acc.mean() - refvals::ou_mean) < 4.0 * std::sqrt(acc.var() / n_paths));
    CHECK(std::abs(acc.var() - refvals::ou_var) < 5.0 * acc.var() * std::sqrt(2.0 / n_paths));
}

TEST_CASE("log-scale gaussian model matches its closed-form law") {
    // log C reverts to log-level 1 from log 3 with kappa 0.8, lambda 0.5
    ExpOuCarbon model({3.0}, {1.0}, {0.8}, {0.5});
    const int n_paths = 20000;
    Acc acc;
    for (int p = 0; p < n_paths; ++p) {
        Philox g(557, stream_id(StreamPurpose::carbon, static_cast<std::uint64_t>(p)));
        const CarbonGrid grid = simulate_carbon_grid(model, 2.0, 8, g);
        CHECK(grid.at(8)[0] > 0.0);
        acc.add(std::log(grid.at(8)[0]));
    }
    CHECK(std::abs(acc.mean() - refvals::logou_mean) < 4.0 * std::sqrt(acc.var() / n_paths));
    CHECK(std::abs(acc.var() - refvals::logou_var) < 5.0 * acc.var() * std::sqrt(2.0 / n_paths));
}

TEST_CASE("carbon grids are reproducible and models clone cleanly") {
    SquareRootCarbon model(bench_c0, bench_cbar, bench_kappa, bench_lambda);
    Philox g1(9, stream_id(StreamPurpose::carbon, 0));
    const CarbonGrid a = simulate_carbon_grid(model, 2.0, 10, g1);
    CHECK(a.d == 4);
    CHECK(a.values.size() == 11 * 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a.at(0)[i] == bench_c0[i]);

    // stepping with a different h in between must not disturb a clone
    auto clone = model.clone();
    Philox scramble(10, stream_id(StreamPurpose::scratch, 1));
    CarbonState s;
    model.init(s, scramble);
    model.step(0.0, 0.37, s, scramble);

    Philox g2(9, stream_id(StreamPurpose::carbon, 0));
    const CarbonGrid b = simulate_carbon_grid(*clone, 2.0, 10, g2);
    CHECK(a.values == b.values);

    Philox g3(9, stream_id(StreamPurpose::carbon, 0));
    const CarbonGrid c = simulate_carbon_grid(model, 2.0, 10, g3);
    CHECK(a.values == c.values);
}

TEST_CASE("chain carbon validates its generator") {
    const std::vector<Vec> states{{1000.0, 200.0}, {400.0, 80.0}};
    Mat q(2);
    q(0, 0) = -0.3;
    q(0, 1) = 0.3;
    q(1, 0) = 0.5;
    q(1, 1) = -0.5;

    CHECK_NOTHROW(ChainCarbon(states, q, {1.0, 0.0}));

    Mat bad_row = q;
    bad_row(0, 1) = 0.4;  // row sum no longer zero
    CHECK_THROWS_AS(ChainCarbon(states, bad_row, {1.0, 0.0}), ConfigError);

    Mat bad_sign = q;
    bad_sign(0, 1) = -0.3;
    bad_sign(0, 0) = 0.3;
    CHECK_THROWS_AS(ChainCarbon(states, bad_sign, {1.0, 0.0}), ConfigError);

    CHECK_THROWS_AS(ChainCarbon(states, q, {0.4, 0.4}), ConfigError);
    CHECK_THROWS_AS(ChainCarbon(states, q, {-0.2, 1.2}), ConfigError);
    CHECK_THROWS_AS(ChainCarbon({{1000.0, 200.0}, {400.0}}, q, {1.0, 0.0}), ConfigError);
}

TEST_CASE("chain sojourns and jumps follow the generator") {
    const std::vector<Vec> states{{10.0}, {20.0}, {30.0}};
    Mat q(3);
    q(0, 0) = -2.0;
    q(0, 1) = 1.5;
    q(0, 2) = 0.5;
    q(1, 0) = 1.0;
    q(1, 1) = -1.0;
    q(2, 2) = 0.0;  // absorbing
    const ChainCarbon chain(states, q, {1.0, 0.0, 0.0});

    Philox g(91, stream_id(StreamPurpose::chain, 1));
    Acc sojourn;
    int to1 = 0, to2 = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        sojourn.add(chain.sojourn_time(0, g));
        const int tgt = chain.jump_target(0, g);
        CHECK(tgt != 0);
        if (tgt == 1) ++to1;
        if (tgt == 2) ++to2;
    }
    // Exp(2): mean 1/2, and jump target 1 with probability 0.75
    CHECK(std::abs(sojourn.mean() - 0.5) < 4.0 * std::sqrt(sojourn.var() / n));
    const double p1 = static_cast<double>(to1) / n;
    CHECK(std::abs(p1 - 0.75) < 4.0 * std::sqrt(0.75 * 0.25 / n));
    CHECK(to1 + to2 == n);

    CHECK(chain.sojourn_time(2, g) == std::numeric_limits<double>::infinity());
}

TEST_CASE("chain occupation law matches the two-state closed form") {
    const std::vector<Vec> states{{1000.0, 200.0}, {400.0, 80.0}};
    Mat q(2);
    q(0, 0) = -0.3;
    q(0, 1) = 0.3;
    q(1, 0) = 0.5;
    q(1, 1) = -0.5;
    ChainCarbon chain(states, q, {1.0, 0.0});

    const double t = 2.0;
    const double rate = 0.8;  // q01 + q10
    const double p_in_2 = (0.3 / rate) * (1.0 - std::exp(-rate * t));

    const int n = 40000;
    int in_2 = 0;
    for (int p = 0; p < n; ++p) {
        Philox g(92, stream_id(StreamPurpose::carbon, static_cast<std::uint64_t>(p)));
        const CarbonGrid grid = simulate_carbon_grid(chain, t, 5, g);
        if (grid.at(5)[0] == 400.0) ++in_2;
    }
    const double phat = static_cast<double>(in_2) / n;
    CHECK(std::abs(phat - p_in_2) < 4.0 * std::sqrt(p_in_2 * (1.0 - p_in_2) / n));
}

TEST_CASE("chain initial distribution is sampled") {
    const std::vector<Vec> states{{1.0}, {2.0}};
    Mat q(2);  // no jumps at all
    ChainCarbon chain(states, q, {0.25, 0.75});
    int hi = 0;
    const int n = 20000;
    for (int p = 0; p < n; ++p) {
        Philox g(93, stream_id(StreamPurpose::carbon, static_cast<std::uint64_t>(p)));
        CarbonState s;
        chain.init(s, g);
        CHECK((s.regime == 0 || s.regime == 1));
        CHECK(s.c[0] == (s.regime == 0 ? 1.0 : 2.0));
        if (s.regime == 1) ++hi;
    }
    const double phat = static_cast<double>(hi) / n;
    CHECK(std::abs(phat - 0.75) < 4.0 * std::sqrt(0.75 * 0.25 / n));
}
