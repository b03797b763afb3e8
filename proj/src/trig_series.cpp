#include "billiard/trig_series.hpp"

#include <cmath>
#include <stdexcept>

namespace billiard {

TrigSeries::TrigSeries(std::vector<double> cos_coef, std::vector<double> sin_coef)
    : cos_(std::move(cos_coef)), sin_(std::move(sin_coef)) {
    if (cos_.empty()) cos_.push_back(0.0);
    sin_.resize(cos_.size(), 0.0);
    sin_[0] = 0.0;
}

double TrigSeries::evaluate(double theta) const {
    // cos/sin of n*theta by the angle-addition recurrence.
    const double c1 = std::cos(theta), s1 = std::sin(theta);
    double cn = 1.0, sn = 0.0;
    double f = cos_[0];
    for (size_t n = 1; n < cos_.size(); ++n) {
        const double c = cn * c1 - sn * s1;
        const double s = sn * c1 + cn * s1;
        cn = c;
        sn = s;
        f += cos_[n] * cn + sin_[n] * sn;
    }
    return f;
}

void TrigSeries::evaluate_jet(double theta, int order, double* out) const {
    for (int k = 0; k <= order; ++k) out[k] = 0.0;
    out[0] = cos_[0];
    const double c1 = std::cos(theta), s1 = std::sin(theta);
    double cn = 1.0, sn = 0.0;
    for (size_t n = 1; n < cos_.size(); ++n) {
        const double c = cn * c1 - sn * s1;
        const double s = sn * c1 + cn * s1;
        cn = c;
        sn = s;
        // d/dtheta rotates the mode coefficients: (a, b) -> (n b, -n a).
        double a = cos_[n], b = sin_[n];
        for (int k = 0; k <= order; ++k) {
            out[k] += a * cn + b * sn;
            const double an = static_cast<double>(n) * b;
            const double bn = -static_cast<double>(n) * a;
            a = an;
            b = bn;
        }
    }
}

TrigSeries TrigSeries::derivative() const {
    std::vector<double> dc(cos_.size(), 0.0), ds(cos_.size(), 0.0);
    for (size_t n = 1; n < cos_.size(); ++n) {
        dc[n] = static_cast<double>(n) * sin_[n];
        ds[n] = -static_cast<double>(n) * cos_[n];
    }
    return TrigSeries(std::move(dc), std::move(ds));
}

double TrigSeries::integral_from_zero(double theta) const {
    double f = cos_[0] * theta;
    const double c1 = std::cos(theta), s1 = std::sin(theta);
    double cn = 1.0, sn = 0.0;
    for (size_t n = 1; n < cos_.size(); ++n) {
        const double c = cn * c1 - sn * s1;
        const double s = sn * c1 + cn * s1;
        cn = c;
        sn = s;
        const double inv_n = 1.0 / static_cast<double>(n);
        f += cos_[n] * sn * inv_n + sin_[n] * (1.0 - cn) * inv_n;
    }
    return f;
}

TrigSeries TrigSeries::rotated(double delta) const {
    std::vector<double> rc(cos_.size()), rs(cos_.size(), 0.0);
    rc[0] = cos_[0];
    for (size_t n = 1; n < cos_.size(); ++n) {
        const double c = std::cos(static_cast<double>(n) * delta);
        const double s = std::sin(static_cast<double>(n) * delta);
        rc[n] = cos_[n] * c - sin_[n] * s;
        rs[n] = cos_[n] * s + sin_[n] * c;
    }
    return TrigSeries(std::move(rc), std::move(rs));
}

TrigSeries TrigSeries::reflected() const {
    std::vector<double> rc = cos_, rs = sin_;
    for (size_t n = 1; n < rs.size(); ++n) rs[n] = -rs[n];
    return TrigSeries(std::move(rc), std::move(rs));
}

void TrigSeries::truncate(double eps) {
    size_t last = 0;
    for (size_t n = 1; n < cos_.size(); ++n)
        if (std::abs(cos_[n]) > eps || std::abs(sin_[n]) > eps) last = n;
    cos_.resize(last + 1);
    sin_.resize(last + 1);
}

} // namespace billiard
