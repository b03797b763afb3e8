#include "billiard/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace billiard {

namespace {

/// Jacobi eigenvalues of a small symmetric matrix (row-major n x n),
/// ascending. Only used for condition estimates of the normal system.
std::vector<double> jacobi_eigenvalues(std::vector<double> m, int n) {
    for (int pass = 0; pass < 100; ++pass) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += std::abs(m[static_cast<size_t>(i) * n + j]);
        double scale = 0.0;
        for (int i = 0; i < n; ++i)
            scale = std::max(scale, std::abs(m[static_cast<size_t>(i) * n + i]));
        if (off < 1e-16 * std::max(scale, 1e-300)) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m[static_cast<size_t>(p) * n + q];
                if (apq == 0.0) continue;
                const double app = m[static_cast<size_t>(p) * n + p];
                const double aqq = m[static_cast<size_t>(q) * n + q];
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = m[static_cast<size_t>(k) * n + p];
                    const double akq = m[static_cast<size_t>(k) * n + q];
                    m[static_cast<size_t>(k) * n + p] = c * akp - s * akq;
                    m[static_cast<size_t>(k) * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = m[static_cast<size_t>(p) * n + k];
                    const double aqk = m[static_cast<size_t>(q) * n + k];
                    m[static_cast<size_t>(p) * n + k] = c * apk - s * aqk;
                    m[static_cast<size_t>(q) * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) eig[static_cast<size_t>(i)] = m[static_cast<size_t>(i) * n + i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

} // namespace

ExpansionFit fit_expansion(const std::vector<CausticEstimate>& estimates, double perimeter,
                           int order) {
    if (order < 1) throw BadSpec("expansion order must be >= 1");
    const int n = static_cast<int>(estimates.size());
    if (n < order + 2)
        throw InsufficientSamples("need at least K+2 caustic estimates for an order-K fit");
    std::set<double> distinct;
    for (const auto& e : estimates) {
        if (!(e.lazutkin_Q > 0.0)) throw BadSpec("Lazutkin parameters must be positive");
        distinct.insert(e.lazutkin_Q);
    }
    if (static_cast<int>(distinct.size()) < order + 2)
        throw InsufficientSamples("Lazutkin parameters must be distinct");

    ExpansionFit fit;
    fit.order = order;
    fit.n_samples = n;

    std::vector<double> u(static_cast<size_t>(n)), y(static_cast<size_t>(n)),
        w(static_cast<size_t>(n));
    double u_max = 0.0;
    double err_floor = 1e-14 * perimeter;
    for (int i = 0; i < n; ++i) {
        u[static_cast<size_t>(i)] = std::pow(estimates[static_cast<size_t>(i)].lazutkin_Q, 2.0 / 3.0);
        y[static_cast<size_t>(i)] = estimates[static_cast<size_t>(i)].gamma_length - perimeter;
        u_max = std::max(u_max, u[static_cast<size_t>(i)]);
    }
    for (int i = 0; i < n; ++i) {
        const double err = std::max(estimates[static_cast<size_t>(i)].err_bar, err_floor);
        w[static_cast<size_t>(i)] = 1.0 / (err * err);
    }
    fit.u_min = *std::min_element(u.begin(), u.end());
    fit.u_max = u_max;

    // Normal system on the scaled basis v^k, v = u/u_max.
    const int k = order;
    std::vector<double> gram(static_cast<size_t>(k) * k, 0.0);
    std::vector<double> rhsv(static_cast<size_t>(k), 0.0);
    for (int i = 0; i < n; ++i) {
        const double v = u[static_cast<size_t>(i)] / u_max;
        double pa = v;
        std::vector<double> basis(static_cast<size_t>(k));
        for (int a = 0; a < k; ++a, pa *= v) basis[static_cast<size_t>(a)] = pa;
        for (int a = 0; a < k; ++a) {
            rhsv[static_cast<size_t>(a)] += w[static_cast<size_t>(i)] * basis[static_cast<size_t>(a)] * y[static_cast<size_t>(i)];
            for (int b = 0; b < k; ++b)
                gram[static_cast<size_t>(a) * k + b] +=
                    w[static_cast<size_t>(i)] * basis[static_cast<size_t>(a)] * basis[static_cast<size_t>(b)];
        }
    }

    const std::vector<double> eig = jacobi_eigenvalues(gram, k);
    const double lam_max = eig.back();
    const double lam_min = eig.front();
    fit.condition_number = lam_min > 0.0 ? std::sqrt(lam_max / lam_min)
                                         : std::numeric_limits<double>::infinity();
    if (!(fit.condition_number < 1e12))
        throw IllConditioned("design condition " + std::to_string(fit.condition_number) +
                             "; narrow the q window or lower K");

    // Gauss-Jordan on the (guarded) normal system, with the explicit inverse
    // kept for the coefficient covariance.
    std::vector<double> coef_scaled(static_cast<size_t>(k), 0.0);
    std::vector<double> gram_inv(static_cast<size_t>(k) * k, 0.0);
    {
        std::vector<double> aug(static_cast<size_t>(k) * (2 * k + 1), 0.0);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) aug[static_cast<size_t>(i) * (2 * k + 1) + j] = gram[static_cast<size_t>(i) * k + j];
            aug[static_cast<size_t>(i) * (2 * k + 1) + k + i] = 1.0;
            aug[static_cast<size_t>(i) * (2 * k + 1) + 2 * k] = rhsv[static_cast<size_t>(i)];
        }
        const int cols = 2 * k + 1;
        for (int c = 0; c < k; ++c) {
            int piv = c;
            for (int r = c + 1; r < k; ++r)
                if (std::abs(aug[static_cast<size_t>(r) * cols + c]) >
                    std::abs(aug[static_cast<size_t>(piv) * cols + c]))
                    piv = r;
            if (piv != c)
                for (int j = 0; j < cols; ++j)
                    std::swap(aug[static_cast<size_t>(c) * cols + j], aug[static_cast<size_t>(piv) * cols + j]);
            const double d = aug[static_cast<size_t>(c) * cols + c];
            for (int j = 0; j < cols; ++j) aug[static_cast<size_t>(c) * cols + j] /= d;
            for (int r = 0; r < k; ++r) {
                if (r == c) continue;
                const double f = aug[static_cast<size_t>(r) * cols + c];
                if (f == 0.0) continue;
                for (int j = 0; j < cols; ++j)
                    aug[static_cast<size_t>(r) * cols + j] -= f * aug[static_cast<size_t>(c) * cols + j];
            }
        }
        for (int i = 0; i < k; ++i) {
            coef_scaled[static_cast<size_t>(i)] = aug[static_cast<size_t>(i) * cols + 2 * k];
            for (int j = 0; j < k; ++j)
                gram_inv[static_cast<size_t>(i) * k + j] = aug[static_cast<size_t>(i) * cols + k + j];
        }
    }

    // Residuals and the noise scale for coefficient errors.
    double rss = 0.0, chi2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = u[static_cast<size_t>(i)] / u_max;
        double model = 0.0, pa = v;
        for (int a = 0; a < k; ++a, pa *= v) model += coef_scaled[static_cast<size_t>(a)] * pa;
        const double r = y[static_cast<size_t>(i)] - model;
        rss += r * r;
        chi2 += w[static_cast<size_t>(i)] * r * r;
    }
    fit.residual_rms = std::sqrt(rss / n);
    const double dof = std::max(1, n - k);
    const double sigma_sq = std::max(1.0, chi2 / dof);

    fit.coefficients.resize(static_cast<size_t>(k));
    fit.stderrs.resize(static_cast<size_t>(k));
    double scale_pow = u_max;
    for (int a = 0; a < k; ++a, scale_pow *= u_max) {
        fit.coefficients[static_cast<size_t>(a)] = coef_scaled[static_cast<size_t>(a)] / scale_pow;
        fit.stderrs[static_cast<size_t>(a)] =
            std::sqrt(std::max(0.0, gram_inv[static_cast<size_t>(a) * k + a] * sigma_sq)) / scale_pow;
    }
    return fit;
}

std::vector<RatioEntry> ratio_consistency(const std::vector<ExpansionFit>& fits,
                                          const std::vector<InvariantVector>& invariants,
                                          int k) {
    if (fits.size() != invariants.size())
        throw BadSpec("ratio_consistency needs one invariant vector per fit");
    if (k < 1 || k > 4) throw BadSpec("ratio order k must be in [1, 4]");
    std::vector<RatioEntry> out;
    out.reserve(fits.size());
    for (size_t i = 0; i < fits.size(); ++i) {
        if (fits[i].order < k) throw BadSpec("fit order below requested ratio order");
        RatioEntry e;
        e.coefficient = fits[i].coefficients[static_cast<size_t>(k - 1)];
        e.invariant = invariants[i].values[static_cast<size_t>(k)];
        if (!(std::abs(e.invariant) > 0.0)) throw BadSpec("invariant I_k vanishes");
        const double noise = 3.0 * fits[i].stderrs[static_cast<size_t>(k - 1)];
        e.indeterminate = std::abs(e.coefficient) < noise;
        e.ratio = e.indeterminate ? 0.0 : e.coefficient / e.invariant;
        out.push_back(e);
    }
    return out;
}

} // namespace billiard
