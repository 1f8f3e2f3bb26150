#pragma once

#include <cmath>
#include <functional>
#include <vector>

// Small numeric helpers for tests: adaptive quadrature oracles and sample
// statistics. These stay independent of the library code they check.

namespace testutil {

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_impl(const std::function<double(double)>& f, double a, double b,
                                    double fa, double fm, double fb, double whole, double tol,
                                    int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_impl(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson_impl(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int depth = 28) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return adaptive_simpson_impl(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb), tol, depth);
}

// integral over [lo, hi] in log space; suited to densities with many decades
// of support
inline double integrate_log(const std::function<double(double)>& f, double lo, double hi,
                            double tol = 1e-12) {
    auto g = [&](double u) {
        const double w = std::exp(u);
        return f(w) * w;
    };
    return integrate(g, std::log(lo), std::log(hi), tol);
}

struct MeanErr {
    double mean;
    double std_error;
};

inline MeanErr mean_and_se(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - m) * (x - m);
    var /= static_cast<double>(xs.size() - 1);
    return MeanErr{m, std::sqrt(var / static_cast<double>(xs.size()))};
}

}  // namespace testutil
