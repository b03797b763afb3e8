#include "billiard/invariants.hpp"

#include <cmath>
#include <numbers>

namespace billiard {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double pw(double base, double num, double den) { return std::pow(base, num / den); }

} // namespace

InvariantVector compute_invariants(const SupportDomain& domain) {
    const int n = domain.node_count();
    const double dt = kTwoPi / n;
    InvariantVector inv;
    for (int j = 0; j < n; ++j) {
        const CurvatureJet jet = domain.curvature_jet(dt * j, 3);
        const double k = jet[0], k1 = jet[1], k2 = jet[2], k3 = jet[3];
        const double w = dt / k; // rho dtheta = ds

        inv.values[0] += w;
        inv.values[1] += pw(k, 2, 3) * w;
        inv.values[2] += (9.0 * pw(k, 4, 3) + 8.0 * k1 * k1 / pw(k, 8, 3)) * w;

        const double k1sq = k1 * k1;
        const double i3_terms[5] = {
            9.0 * k * k,
            24.0 * k1sq / (k * k),
            24.0 * k2 * k2 / pw(k, 4, 1),
            -144.0 * k1sq * k2 / pw(k, 5, 1),
            176.0 * k1sq * k1sq / pw(k, 6, 1),
        };
        for (int t = 0; t < 5; ++t) inv.term_i3[static_cast<size_t>(t)] += i3_terms[t] * w;

        const double i4_terms[11] = {
            (281.0 / 44800.0) * pw(k, 8, 3),
            (281.0 / 8400.0) * k1sq / pw(k, 4, 3),
            (167.0 / 4200.0) * k2 * k2 / pw(k, 10, 3),
            -(167.0 / 700.0) * k1sq * k2 / pw(k, 13, 3),
            (1.0 / 42.0) * k3 * k3 / pw(k, 16, 3),
            (559.0 / 2100.0) * k1sq * k1sq / pw(k, 16, 3),
            -(473.0 / 4725.0) * k2 * k2 * k2 / pw(k, 19, 3),
            -(10.0 / 21.0) * k3 * k1 * k2 / pw(k, 19, 3),
            (5.0 / 7.0) * k3 * k1sq * k1 / pw(k, 22, 3),
            (10777.0 / 1575.0) * k1sq * k1sq * k2 / pw(k, 25, 3),
            (521897.0 / 127575.0) * k1sq * k1sq * k1sq / pw(k, 28, 3),
        };
        for (int t = 0; t < 11; ++t) inv.term_i4[static_cast<size_t>(t)] += i4_terms[t] * w;
    }
    for (double t : inv.term_i3) inv.values[3] += t;
    for (double t : inv.term_i4) inv.values[4] += t;
    return inv;
}

IbpReport verify_ibp_identity(const SupportDomain& domain) {
    const int n = domain.node_count();
    const double dt = kTwoPi / n;
    IbpReport rep;
    for (int j = 0; j < n; ++j) {
        const CurvatureJet jet = domain.curvature_jet(dt * j, 2);
        const double k = jet[0], k1 = jet[1], k2 = jet[2];
        const double w = dt / k;
        rep.lhs += (k1 * k1 * k1 * k1) / std::pow(k, 6.0) * w;
        rep.rhs += (3.0 / 5.0) * (k1 * k1 * k2) / std::pow(k, 5.0) * w;
    }
    rep.abs_gap = std::abs(rep.lhs - rep.rhs);
    const double scale = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
    rep.rel_gap = scale > 1e-13 ? rep.abs_gap / scale : 0.0;
    return rep;
}

CompletedSquareReport verify_completed_square(const SupportDomain& domain) {
    const InvariantVector inv = compute_invariants(domain);
    const int n = domain.node_count();
    const double dt = kTwoPi / n;
    const double a_sq = 23.13; // = 9 * 257 / 100, keeps 24 - A^2 > 0
    const double a = std::sqrt(a_sq);
    // roots of B^2 - sqrt(257) B + 64 = 0, the square-completion condition
    const double b_roots[2] = {0.5 * (std::sqrt(257.0) - 1.0), 0.5 * (std::sqrt(257.0) + 1.0)};

    CompletedSquareReport rep;
    rep.direct_i3 = inv.values[3];
    CompletedSquareBranch* branches[2] = {&rep.minus_branch, &rep.plus_branch};
    for (int r = 0; r < 2; ++r) {
        CompletedSquareBranch& br = *branches[r];
        br.b_value = b_roots[r];
        for (int j = 0; j < n; ++j) {
            const CurvatureJet jet = domain.curvature_jet(dt * j, 2);
            const double k = jet[0], k1 = jet[1], k2 = jet[2];
            const double w = dt / k;
            const double k6 = std::pow(k, 6.0);
            const double sq = a * k2 * k - br.b_value * k1 * k1;
            br.terms[0] += 9.0 * k * k * w;
            br.terms[1] += 24.0 * k1 * k1 / (k * k) * w;
            br.terms[2] += sq * sq / k6 * w;
            br.terms[3] += (24.0 - a_sq) * k2 * k2 * k * k / k6 * w;
        }
        br.total = br.terms[0] + br.terms[1] + br.terms[2] + br.terms[3];
        br.terms_nonnegative = true;
        for (double t : br.terms)
            if (t < -1e-13 * std::abs(br.total)) br.terms_nonnegative = false;
        br.rel_gap = std::abs(br.total - rep.direct_i3) / std::abs(rep.direct_i3);
    }
    return rep;
}

LogCurvatureReport verify_log_curvature_bound(const SupportDomain& domain) {
    const int n = domain.node_count();
    const double dt = kTwoPi / n;
    const double ell = domain.perimeter();
    LogCurvatureReport rep;
    double log_min = std::numeric_limits<double>::infinity();
    double log_max = -log_min;
    rep.kappa_min = std::numeric_limits<double>::infinity();
    rep.kappa_max = 0.0;
    for (int j = 0; j < n; ++j) {
        const CurvatureJet jet = domain.curvature_jet(dt * j, 1);
        const double k = jet[0], k1 = jet[1];
        const double w = dt / k;
        const double dlog = k1 / k;
        rep.gauss_bonnet += k * w;
        rep.grad_sq_form += std::pow(k, -2.0 / 3.0) * dlog * dlog * w;
        rep.monomial_form += 8.0 * k1 * k1 / std::pow(k, 8.0 / 3.0) * w;
        rep.invariant_one += std::pow(k, 2.0 / 3.0) * w;
        rep.invariant_two +=
            (9.0 * std::pow(k, 4.0 / 3.0) + 8.0 * k1 * k1 / std::pow(k, 8.0 / 3.0)) * w;
        rep.total_variation += std::abs(dlog) * w;
        log_min = std::min(log_min, std::log(k));
        log_max = std::max(log_max, std::log(k));
        rep.kappa_min = std::min(rep.kappa_min, k);
        rep.kappa_max = std::max(rep.kappa_max, k);
    }
    rep.grad_sq_form *= 8.0;
    rep.osc_log_kappa = log_max - log_min;
    rep.cauchy_schwarz_bound = std::sqrt(rep.invariant_one * rep.invariant_two / 8.0);
    rep.holder_bound = std::pow(kTwoPi, 2.0 / 3.0) * std::cbrt(ell);
    rep.pointwise_c = std::abs(std::log(kTwoPi / ell)) + rep.total_variation;

    const double eps = 1e-12 * std::max(1.0, rep.invariant_two);
    const bool grad_matches = std::abs(rep.grad_sq_form - rep.monomial_form) <= eps;
    const bool within_i2 = rep.monomial_form <= rep.invariant_two + eps;
    const bool cauchy = rep.total_variation <= rep.cauchy_schwarz_bound + eps;
    const bool holder = rep.invariant_one <= rep.holder_bound + eps;
    const bool osc = rep.osc_log_kappa <= rep.total_variation + eps;
    const bool pointwise = rep.kappa_min >= std::exp(-rep.pointwise_c) - eps &&
                           rep.kappa_max <= std::exp(rep.pointwise_c) + eps;
    rep.chain_holds = grad_matches && within_i2 && cauchy && holder && osc && pointwise;
    return rep;
}

} // namespace billiard
