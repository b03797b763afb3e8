#ifndef BILLIARD_INVARIANTS_HPP
#define BILLIARD_INVARIANTS_HPP

#include <array>
#include <vector>

#include "billiard/geometry.hpp"

namespace billiard {

/// The first five integral invariants of the caustic-length expansion,
/// boundary integrals of curvature-jet polynomials:
///   I0 = perimeter,  I1 = int kappa^{2/3} ds,
///   I2 = int (9 kappa^{4/3} + 8 kappa_1^2 / kappa^{8/3}) ds,  etc.
/// term_* keep the per-monomial integrals of I3 (5 terms) and I4 (11 terms)
/// for the identity checks.
struct InvariantVector {
    std::array<double, 5> values{};
    std::array<double, 5> term_i3{};
    std::array<double, 11> term_i4{};
};

InvariantVector compute_invariants(const SupportDomain& domain);

/// Integration-by-parts identity int kappa_1^4 / kappa^6 ds
/// = (3/5) int kappa_1^2 kappa_2 / kappa^5 ds, exact on every smooth closed
/// curve; the gap is pure quadrature noise.
struct IbpReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_gap = 0.0;
    double rel_gap = 0.0; // gap over max(|lhs|, |rhs|), 0 when both vanish
};

IbpReport verify_ibp_identity(const SupportDomain& domain);

/// I3 via the completed-square integrand
///   9 k^2 + 24 k1^2/k^2 + (A k2 k - B k1^2)^2/k^6 + (24 - A^2) k2^2 k^2/k^6
/// with A^2 = 23.13 and B a root of B^2 - sqrt(257) B + 64 = 0 (both roots
/// exercised). Each of the four terms integrates to a nonnegative number.
struct CompletedSquareBranch {
    double b_value = 0.0;
    double total = 0.0;
    std::array<double, 4> terms{};
    bool terms_nonnegative = false;
    double rel_gap = 0.0; // against the direct I3 quadrature
};

struct CompletedSquareReport {
    double direct_i3 = 0.0;
    CompletedSquareBranch minus_branch;
    CompletedSquareBranch plus_branch;
};

CompletedSquareReport verify_completed_square(const SupportDomain& domain);

/// The L^inf log-curvature chain:
///  (i)   8 int kappa^{-2/3} ((log kappa)')^2 ds = int 8 k1^2/k^{8/3} ds <= I2
///  (ii)  (int |(log kappa)'| ds)^2 <= I1 * I2 / 8          (Cauchy-Schwarz)
///  (iii) I1 <= (2 pi)^{2/3} ell^{1/3}                      (Holder + Gauss-Bonnet)
///  (iv)  osc(log kappa) <= int |(log kappa)'| ds
/// plus the pointwise corollary exp(-C) <= kappa <= exp(C) with
/// C = |log(2 pi / ell)| + total variation of log kappa.
struct LogCurvatureReport {
    double gauss_bonnet = 0.0; // int kappa ds, equals 2 pi to quadrature accuracy
    double grad_sq_form = 0.0; // 8 int kappa^{-2/3} ((log kappa)')^2 ds
    double monomial_form = 0.0; // int 8 k1^2 / k^{8/3} ds (same thing, termwise)
    double invariant_one = 0.0; // I1
    double invariant_two = 0.0; // I2
    double total_variation = 0.0;
    double cauchy_schwarz_bound = 0.0; // sqrt(I1 * I2 / 8)
    double holder_bound = 0.0;         // (2 pi)^{2/3} ell^{1/3}
    double osc_log_kappa = 0.0;
    double pointwise_c = 0.0;
    double kappa_min = 0.0;
    double kappa_max = 0.0;
    bool chain_holds = false;
};

LogCurvatureReport verify_log_curvature_bound(const SupportDomain& domain);

} // namespace billiard

#endif
