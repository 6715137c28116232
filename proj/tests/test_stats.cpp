#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "carbonfund/rng.hpp"
#include "carbonfund/stats.hpp"

using namespace carbonfund;

TEST_CASE("normal pdf and cdf") {
    CHECK(norm_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5));
    CHECK(norm_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(norm_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-12));
    // symmetry and sane deep tails
    for (double x : {0.3, 1.0, 2.5, 5.0, 8.0}) {
        CHECK(norm_cdf(x) + norm_cdf(-x) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(norm_cdf(-x) > 0.0);
    }
    CHECK(norm_cdf(-40.0) == 0.0);  // underflows cleanly, never negative
}

TEST_CASE("running statistics match two-pass formulas") {
    Philox g(5, stream_id(StreamPurpose::scratch, 7));
    std::vector<double> xs(5000);
    for (auto& x : xs) x = 3.0 + 2.0 * g.normal();

    RunningStat rs;
    for (double x : xs) rs.add(x);

    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double m2 = 0.0;
    for (double x : xs) m2 += (x - mean) * (x - mean);
    const double var = m2 / static_cast<double>(xs.size() - 1);

    CHECK(rs.n == xs.size());
    CHECK(rs.mean == doctest::Approx(mean).epsilon(1e-13));
    CHECK(rs.variance() == doctest::Approx(var).epsilon(1e-12));
    CHECK(rs.stddev() == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
    CHECK(rs.std_error() ==
          doctest::Approx(std::sqrt(var / static_cast<double>(xs.size()))).epsilon(1e-12));
}

TEST_CASE("merging partial statistics equals one pass") {
    Philox g(6, stream_id(StreamPurpose::scratch, 8));
    std::vector<double> xs(997);
    for (auto& x : xs) x = g.uniform() * 10.0 - 4.0;

    RunningStat whole;
    for (double x : xs) whole.add(x);

    for (std::size_t split : {1u, 250u, 996u}) {
        RunningStat a, b;
        for (std::size_t i = 0; i < split; ++i) a.add(xs[i]);
        for (std::size_t i = split; i < xs.size(); ++i) b.add(xs[i]);
        RunningStat m = a;
        m.merge(b);
        CHECK(m.n == whole.n);
        CHECK(m.mean == doctest::Approx(whole.mean).epsilon(1e-13));
        CHECK(m.variance() == doctest::Approx(whole.variance()).epsilon(1e-12));
    }

    RunningStat empty, one;
    one.add(2.5);
    RunningStat m = empty;
    m.merge(one);
    CHECK(m.n == 1);
    CHECK(m.mean == 2.5);
    m.merge(empty);
    CHECK(m.n == 1);
}

TEST_CASE("sample quantiles interpolate order statistics") {
    const std::vector<double> odd{5.0, 1.0, 3.0};
    CHECK(sample_quantile(odd, 0.5) == doctest::Approx(3.0));
    CHECK(sample_quantile(odd, 0.0) == doctest::Approx(1.0));
    CHECK(sample_quantile(odd, 1.0) == doctest::Approx(5.0));

    const std::vector<double> even{4.0, 1.0, 2.0, 3.0};
    CHECK(sample_quantile(even, 0.5) == doctest::Approx(2.5));
    CHECK(sample_quantile(even, 0.25) == doctest::Approx(1.75));
    // p=0.9 lands at position 2.7 between 3 and 4
    CHECK(sample_quantile(even, 0.9) == doctest::Approx(3.7));
}
