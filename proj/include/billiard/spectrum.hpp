#ifndef BILLIARD_SPECTRUM_HPP
#define BILLIARD_SPECTRUM_HPP

#include <vector>

#include "billiard/geometry.hpp"
#include "billiard/orbits.hpp"

namespace billiard {

struct Rational {
    int p = 0;
    int q = 1;
    double value() const { return static_cast<double>(p) / q; }
};

/// Reduces p/q to lowest terms.
Rational reduced(int p, int q);

/// One sample of the mean minimal action. Internal sign convention: the
/// action generating function is minus the chord length, so
/// beta = -mls / q < 0, beta'(0) = -perimeter, and the Legendre relations
/// for caustic data hold verbatim.
struct BetaSample {
    int p = 0;
    int q = 0;
    double omega = 0.0;
    double mls_length = 0.0;
    double beta = 0.0;
};

/// Evaluates beta at each rotation number (lowest terms, in (0, 1/2]).
std::vector<BetaSample> beta_table(const SupportDomain& domain,
                                   const std::vector<Rational>& rotations);

/// Derivative estimate at the middle of three consecutive samples: the
/// nonuniform three-point formula plus the two-point secant for error
/// control.
struct DerivativeEstimate {
    double omega = 0.0;
    double three_point = 0.0;
    double secant = 0.0;
    double err_bar = 0.0; // |three_point - secant|
};

DerivativeEstimate beta_derivative(const BetaSample& a, const BetaSample& b,
                                   const BetaSample& c);

/// Richardson extrapolation of beta(omega)/omega from the two smallest
/// sampled rotation numbers; converges to beta'(0) = -perimeter.
double beta_prime_at_zero(const std::vector<BetaSample>& samples);

/// Caustic data extracted from beta finite differences via the Legendre
/// relations: gamma_length = -beta'(omega), lazutkin_Q = omega beta'(omega)
/// - beta(omega).
struct CausticEstimate {
    double omega_mid = 0.0;
    double gamma_length = 0.0;
    double lazutkin_Q = 0.0;
    int fd_order = 0;    // stencil width that produced the derivative
    double err_bar = 0.0; // 3-point vs secant discrepancy, for fit weights
};

/// Sweeps q in [q_min, q_max] along the family omega = p/q. Uses a
/// five-point stencil over neighboring rationals when available (the
/// three-point one leaves O(1/q^2) relative error in Q, too coarse for the
/// asymptotic fits), falling back to three points at the family edge.
/// Throws NonMonotone if gamma_length fails to increase toward the
/// perimeter as q grows.
std::vector<CausticEstimate> caustic_estimates(const SupportDomain& domain, int q_min,
                                               int q_max, int p = 1);

/// Discrete convexity check: second divided differences of beta over the
/// sample set, sorted by omega. Empty when fewer than three samples.
struct SecondDifference {
    double omega = 0.0;
    double value = 0.0;
    bool positive = false;
};

std::vector<SecondDifference> convexity_report(std::vector<BetaSample> samples);

} // namespace billiard

#endif
