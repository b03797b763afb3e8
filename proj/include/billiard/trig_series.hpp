#ifndef BILLIARD_TRIG_SERIES_HPP
#define BILLIARD_TRIG_SERIES_HPP

#include <cstddef>
#include <vector>

namespace billiard {

/// Truncated real trigonometric polynomial
///     f(theta) = a[0] + sum_{n>=1} ( a[n] cos(n theta) + b[n] sin(n theta) ).
///
/// All differentiation is done exactly on the coefficient arrays, never by
/// finite differences; that keeps high-order curvature derivatives clean.
class TrigSeries {
public:
    TrigSeries() = default;
    TrigSeries(std::vector<double> cos_coef, std::vector<double> sin_coef);

    /// Highest frequency with a stored coefficient (0 for a constant).
    int degree() const { return static_cast<int>(cos_.size()) - 1; }

    double cos_coef(int n) const { return cos_[static_cast<size_t>(n)]; }
    double sin_coef(int n) const { return sin_[static_cast<size_t>(n)]; }

    double evaluate(double theta) const;

    /// Fills out[0..order] with f(theta), f'(theta), ..., f^(order)(theta).
    void evaluate_jet(double theta, int order, double* out) const;

    /// Exact coefficient-level derivative: (a,b) -> (n b, -n a) per mode.
    TrigSeries derivative() const;

    /// Integral of f from 0 to theta (has the secular term a[0]*theta, so it
    /// is a function, not a TrigSeries).
    double integral_from_zero(double theta) const;

    /// Coefficients of f(theta - delta) (rigid rotation of the curve).
    TrigSeries rotated(double delta) const;

    /// Coefficients of f(-theta) (reflection across the x-axis).
    TrigSeries reflected() const;

    /// Drops trailing modes whose coefficients are all below eps in absolute
    /// value; always keeps the constant term.
    void truncate(double eps);

private:
    std::vector<double> cos_ = {0.0};
    std::vector<double> sin_ = {0.0};
};

} // namespace billiard

#endif
