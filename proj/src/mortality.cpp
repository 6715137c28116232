#include "carbonfund/mortality.hpp"

#include <cmath>

#include "carbonfund/errors.hpp"

namespace carbonfund {

double Mortality::intensity(double age, double t) const {
    return xi + std::exp((age + t + m_sign * m) / b) / b;
}

double Mortality::cumulative_hazard(double age, double t) const {
    // integral of the age component: e^{(age +/- m)/b} (e^{t/b} - 1)
    return xi * t + std::exp((age + m_sign * m) / b) * std::expm1(t / b);
}

double Mortality::survival(double age, double t) const {
    return std::exp(-cumulative_hazard(age, t));
}

double Mortality::death_weight(double age, double t, double r) const {
    return std::exp(-r * t) * survival(age, t) * intensity(age, t);
}

double Mortality::lifetime_from_uniform(double age, double u) const {
    if (!(u > 0.0 && u <= 1.0)) throw NumericalError("mortality: uniform draw out of range");
    const double target = -std::log(u);  // cumulative hazard at the death time
    if (target == 0.0) return 0.0;
    const double a = std::exp((age + m_sign * m) / b);
    // Each term of the hazard integral alone already reaches `target` at the
    // bounds below, so their minimum lies at or beyond the root. Newton on a
    // convex increasing function then descends monotonically, and starting at
    // the bound keeps e^{tau/b} from overflowing.
    double tau = std::min(b * std::log1p(target / a), target / xi);
    for (int it = 0; it < 100; ++it) {
        const double grow = std::exp(tau / b);
        const double val = xi * tau + a * (grow - 1.0) - target;
        const double slope = xi + a * grow / b;
        const double step = val / slope;
        tau -= step;
        if (tau < 0.0) tau = 0.0;
        if (std::abs(step) < 1e-13 * (1.0 + tau)) break;
    }
    return tau;
}

double Mortality::sample_lifetime(double age, Philox& g) const {
    return lifetime_from_uniform(age, g.uniform());
}

} // namespace carbonfund
