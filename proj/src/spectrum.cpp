#include "billiard/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace billiard {

namespace {

/// Derivative of the interpolating polynomial through (x_j, f_j) evaluated
/// at node x_0 (index `center`).
double lagrange_derivative_at_node(const std::vector<double>& x, const std::vector<double>& f,
                                   size_t center) {
    const size_t n = x.size();
    double result = 0.0;
    for (size_t j = 0; j < n; ++j) {
        if (j == center) {
            double acc = 0.0;
            for (size_t k = 0; k < n; ++k)
                if (k != center) acc += 1.0 / (x[center] - x[k]);
            result += f[j] * acc;
        } else {
            double num = 1.0, den = x[j] - x[center];
            for (size_t k = 0; k < n; ++k) {
                if (k == j || k == center) continue;
                num *= (x[center] - x[k]);
                den *= (x[j] - x[k]);
            }
            result += f[j] * num / den;
        }
    }
    return result;
}

} // namespace

Rational reduced(int p, int q) {
    const int g = std::gcd(p, q);
    return {p / g, q / g};
}

std::vector<BetaSample> beta_table(const SupportDomain& domain,
                                   const std::vector<Rational>& rotations) {
    std::vector<BetaSample> out;
    out.reserve(rotations.size());
    for (const Rational& r : rotations) {
        if (r.p < 1 || r.q < 2 || std::gcd(r.p, r.q) != 1 || 2 * r.p > r.q)
            throw BadSpec("rotation number " + std::to_string(r.p) + "/" + std::to_string(r.q) +
                          " must be in lowest terms and in (0, 1/2]");
        BetaSample s;
        s.p = r.p;
        s.q = r.q;
        s.omega = r.value();
        s.mls_length = mls(domain, r.p, r.q);
        s.beta = -s.mls_length / r.q;
        out.push_back(s);
    }
    return out;
}

DerivativeEstimate beta_derivative(const BetaSample& a, const BetaSample& b,
                                   const BetaSample& c) {
    std::vector<const BetaSample*> s = {&a, &b, &c};
    std::sort(s.begin(), s.end(),
              [](const BetaSample* l, const BetaSample* r) { return l->omega < r->omega; });
    if (s[0]->omega == s[1]->omega || s[1]->omega == s[2]->omega)
        throw InsufficientSamples("beta_derivative needs three distinct rotation numbers");
    const std::vector<double> x = {s[0]->omega, s[1]->omega, s[2]->omega};
    const std::vector<double> f = {s[0]->beta, s[1]->beta, s[2]->beta};
    DerivativeEstimate est;
    est.omega = x[1];
    est.three_point = lagrange_derivative_at_node(x, f, 1);
    est.secant = (f[2] - f[0]) / (x[2] - x[0]);
    est.err_bar = std::abs(est.three_point - est.secant);
    return est;
}

double beta_prime_at_zero(const std::vector<BetaSample>& samples) {
    std::vector<const BetaSample*> s;
    s.reserve(samples.size());
    for (const auto& b : samples) s.push_back(&b);
    std::sort(s.begin(), s.end(),
              [](const BetaSample* l, const BetaSample* r) { return l->omega < r->omega; });
    s.erase(std::unique(s.begin(), s.end(),
                        [](const BetaSample* l, const BetaSample* r) {
                            return l->omega == r->omega;
                        }),
            s.end());
    if (s.size() < 2) throw InsufficientSamples("beta_prime_at_zero needs two distinct omegas");
    // beta/omega = beta'(0) + c omega^2 + O(omega^4); eliminate the omega^2
    // term between the two smallest rotation numbers.
    const double wa = s[0]->omega, wb = s[1]->omega;
    const double ra = s[0]->beta / wa, rb = s[1]->beta / wb;
    return (ra * wb * wb - rb * wa * wa) / (wb * wb - wa * wa);
}

std::vector<CausticEstimate> caustic_estimates(const SupportDomain& domain, int q_min,
                                               int q_max, int p) {
    if (p < 1 || q_min < 2 || q_max < q_min) throw BadSpec("bad caustic sweep range");
    const double ell = domain.perimeter();
    std::vector<CausticEstimate> out;
    out.reserve(static_cast<size_t>(q_max - q_min) + 1);

    for (int q = q_min; q <= q_max; ++q) {
        if (std::gcd(p, q) != 1) continue;
        if (2 * p > q) throw BadSpec("rotation number above 1/2 in caustic sweep");

        // Stencil of neighboring rationals p/(q+j); reduced so that the orbit
        // solver always sees lowest terms (beta depends on omega only).
        std::vector<int> offsets;
        for (int j = -2; j <= 2; ++j)
            if (q + j >= 2 && 2 * p <= q + j) offsets.push_back(j);
        if (offsets.size() < 5) {
            offsets.clear();
            for (int j = -1; j <= 1; ++j)
                if (q + j >= 2 && 2 * p <= q + j) offsets.push_back(j);
        }
        if (offsets.size() < 3)
            throw InsufficientSamples("caustic stencil needs q >= " + std::to_string(2 * p + 1));

        std::vector<double> x, f;
        size_t center = 0;
        double beta_mid = 0.0;
        for (size_t i = 0; i < offsets.size(); ++i) {
            const Rational r = reduced(p, q + offsets[i]);
            const double length = mls(domain, r.p, r.q);
            const double beta = -length / r.q;
            x.push_back(r.value());
            f.push_back(beta);
            if (offsets[i] == 0) {
                center = i;
                beta_mid = beta;
            }
        }
        // omega decreases with q; sort ascending for clarity.
        std::vector<size_t> idx(x.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return x[a] < x[b]; });
        std::vector<double> xs, fs;
        size_t cs = 0;
        for (size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] == center) cs = i;
            xs.push_back(x[idx[i]]);
            fs.push_back(f[idx[i]]);
        }

        const double deriv = lagrange_derivative_at_node(xs, fs, cs);

        // Three-point vs secant discrepancy on the inner neighbors sizes the
        // error bar used as a fit weight.
        double err = 1e-15 * ell;
        if (cs >= 1 && cs + 1 < xs.size()) {
            const std::vector<double> x3 = {xs[cs - 1], xs[cs], xs[cs + 1]};
            const std::vector<double> f3 = {fs[cs - 1], fs[cs], fs[cs + 1]};
            const double d3 = lagrange_derivative_at_node(x3, f3, 1);
            const double d2 = (f3[2] - f3[0]) / (x3[2] - x3[0]);
            err = std::max(err, std::abs(d3 - d2));
        }

        CausticEstimate est;
        est.omega_mid = static_cast<double>(p) / q;
        est.gamma_length = -deriv;
        est.lazutkin_Q = est.omega_mid * deriv - beta_mid;
        est.fd_order = static_cast<int>(xs.size());
        est.err_bar = err;
        out.push_back(est);
    }

    for (size_t i = 0; i + 1 < out.size(); ++i) {
        // q grows along the sweep, so the caustics must lengthen toward ell.
        if (!(out[i + 1].gamma_length > out[i].gamma_length - 1e-9 * ell))
            throw NonMonotone("caustic length not increasing between q sweeps (solver failure?)");
    }
    return out;
}

std::vector<SecondDifference> convexity_report(std::vector<BetaSample> samples) {
    std::sort(samples.begin(), samples.end(),
              [](const BetaSample& a, const BetaSample& b) { return a.omega < b.omega; });
    std::vector<SecondDifference> out;
    if (samples.size() < 3) return out;
    for (size_t i = 1; i + 1 < samples.size(); ++i) {
        const double w0 = samples[i - 1].omega, w1 = samples[i].omega, w2 = samples[i + 1].omega;
        const double f0 = samples[i - 1].beta, f1 = samples[i].beta, f2 = samples[i + 1].beta;
        SecondDifference d;
        d.omega = w1;
        d.value = ((f2 - f1) / (w2 - w1) - (f1 - f0) / (w1 - w0)) / (w2 - w0);
        d.positive = d.value > 0.0;
        out.push_back(d);
    }
    return out;
}

} // namespace billiard
