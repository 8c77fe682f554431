#pragma once

#include <cmath>
#include <functional>

#include "doctest.h"

namespace testing {

// Adaptive Simpson on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int depth = 40)
{
    const auto simpson = [&](double l, double r, double fl, double fm, double fr) {
        return (r - l) / 6.0 * (fl + 4.0 * fm + fr);
    };
    const std::function<double(double, double, double, double, double, double, double, int)> rec =
        [&](double l, double r, double fl, double fm, double fr, double whole, double eps,
            int d) -> double {
        const double m = 0.5 * (l + r);
        const double lm = 0.5 * (l + m), rm = 0.5 * (m + r);
        const double flm = f(lm), frm = f(rm);
        const double left = simpson(l, m, fl, flm, fm);
        const double right = simpson(m, r, fm, frm, fr);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
            return left + right + (left + right - whole) / 15.0;
        }
        return rec(l, m, fl, flm, fm, left, eps / 2, d - 1) +
               rec(m, r, fm, frm, fr, right, eps / 2, d - 1);
    };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, depth);
}

inline void check_close(double actual, double expected, double rel = 1e-12)
{
    CHECK(std::abs(actual - expected) <= rel * std::max(1.0, std::abs(expected)));
}

} // namespace testing
