#ifndef BILLIARD_TESTS_SUPPORT_HPP
#define BILLIARD_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "billiard/geometry.hpp"

namespace billiard::testing {

/// Adaptive Simpson quadrature, independent of the library's trapezoid path;
/// used as the oracle for perimeter and curvature-functional values.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 28) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double x0, double x2, double f0, double f1, double f2, double eps,
            int level) -> double {
        const double x1l = 0.5 * (x0 + 0.5 * (x0 + x2));
        const double x1r = 0.5 * (0.5 * (x0 + x2) + x2);
        const double fl = f(x1l), fr = f(x1r);
        const double h = x2 - x0;
        const double whole = h / 6.0 * (f0 + 4.0 * f1 + f2);
        const double left = h / 12.0 * (f0 + 4.0 * fl + f1);
        const double right = h / 12.0 * (f1 + 4.0 * fr + f2);
        if (level <= 0 || std::abs(left + right - whole) < 15.0 * eps)
            return left + right + (left + right - whole) / 15.0;
        const double xm = 0.5 * (x0 + x2);
        return rec(x0, xm, f0, fl, f1, 0.5 * eps, level - 1) +
               rec(xm, x2, f1, fr, f2, 0.5 * eps, level - 1);
    };
    return rec(a, b, fa, fm, fb, tol, depth);
}

/// Arc length of the ellipse x = a cos t, y = b sin t; a support-function-free
/// oracle for the perimeter.
inline double ellipse_perimeter_oracle(double a, double b, double tol = 1e-13) {
    return adaptive_simpson(
        [a, b](double t) {
            const double s = std::sin(t), c = std::cos(t);
            return std::sqrt(a * a * s * s + b * b * c * c);
        },
        0.0, 2.0 * 3.14159265358979323846, tol);
}

/// Deterministic strictly convex random table: a0 = 1 with a handful of
/// modes whose curvature-radius deviation sums to amp < 1 (so rho stays
/// well clear of zero).
inline SupportDomain random_convex_domain(std::mt19937& rng, double amp_budget = 0.35,
                                          int nodes = 1024) {
    std::uniform_int_distribution<int> mode_count(2, 4);
    std::uniform_int_distribution<int> freq(2, 7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
    const int m = mode_count(rng);
    std::vector<SupportMode> modes;
    std::vector<double> weights;
    double wsum = 0.0;
    for (int i = 0; i < m; ++i) {
        int n = freq(rng);
        while (std::any_of(modes.begin(), modes.end(),
                           [n](const SupportMode& s) { return s.n == n; }))
            n = freq(rng);
        modes.push_back({n, 0.0, 0.0});
        weights.push_back(0.2 + uni(rng));
        wsum += weights.back();
    }
    const double amp = amp_budget * (0.3 + 0.7 * uni(rng));
    for (int i = 0; i < m; ++i) {
        const int n = modes[static_cast<size_t>(i)].n;
        // rho carries the factor (n^2 - 1); budget the support amplitude so
        // the total rho deviation stays at amp.
        const double rho_dev = amp * weights[static_cast<size_t>(i)] / wsum;
        const double coef = rho_dev / (static_cast<double>(n) * n - 1.0);
        const double phase = angle(rng);
        modes[static_cast<size_t>(i)].a = coef * std::cos(phase);
        modes[static_cast<size_t>(i)].b = coef * std::sin(phase);
    }
    return make_support_fourier(1.0, modes, nodes);
}

} // namespace billiard::testing

#endif
