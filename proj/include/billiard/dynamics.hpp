#ifndef BILLIARD_DYNAMICS_HPP
#define BILLIARD_DYNAMICS_HPP

#include <vector>

#include "billiard/geometry.hpp"

namespace billiard {

/// Phase point of the billiard map: boundary arclength plus the incidence
/// angle phi in (0, pi) measured from the forward tangent, with a continuous
/// lift of s for winding-number bookkeeping (s == lift_s mod perimeter).
struct BilliardState {
    double s = 0.0;
    double phi = 0.0;
    double lift_s = 0.0;
};

struct MapOptions {
    double phi_min = 1e-4;       // tangency guard band (rad)
    double residual_scale = 1e-12; // chord-line residual tolerance, times perimeter
    int max_iter = 200;
};

/// Chord data between boundary points x(s), x(s'). `length` is the Euclidean
/// chord length; the derivative fields are partials of the action generating
/// function -|x(s) - x(s')| (minimal-action convention), so along a billiard
/// chord d_s = cos phi, d_sp = -cos phi', and d_ssp < 0 (monotone twist).
struct Chord {
    double length = 0.0;
    double d_s = 0.0;
    double d_sp = 0.0;
    double d_ssp = 0.0;
};

Chord generating_function(const SupportDomain& domain, double s, double sp);

/// Normalizes (s, phi) into a state with lift_s = s.
BilliardState make_state(const SupportDomain& domain, double s, double phi);

/// One reflection. The ray leaving x(s) at angle phi to the tangent is
/// intersected with the boundary (bracketed scan in theta, then safeguarded
/// Newton); phi' follows from the exact turning identity
/// theta' - theta = phi + phi'. Throws TangencyGuard outside the guard band
/// and NoConvergence if the chord-line residual stays above tolerance.
BilliardState billiard_map(const SupportDomain& domain, const BilliardState& state,
                           const MapOptions& opts = {});

/// Time-reversed map: conjugation by phi -> pi - phi; the lift retreats.
BilliardState billiard_map_inverse(const SupportDomain& domain, const BilliardState& state,
                                   const MapOptions& opts = {});

/// n-fold composition (negative n runs the reversed map). Returns the full
/// trajectory including the initial state, |n| + 1 entries.
std::vector<BilliardState> iterate(const SupportDomain& domain, const BilliardState& start,
                                   long n, const MapOptions& opts = {});

/// Minimum of -d2(action)/ds ds' = sin phi sin phi' / chord over random
/// chords, skipping chords inside the tangency guard band. Positive for
/// every valid convex table.
double twist_check(const SupportDomain& domain, int sample_count, unsigned seed = 20240915u,
                   double phi_min = 1e-4);

/// Central-difference Jacobian determinant of the map in the symplectic
/// coordinates (s, cos phi); equals 1 for the exact map. The default step
/// balances O(h^2) truncation against the root-solver noise floor.
double map_jacobian_det(const SupportDomain& domain, double s, double phi,
                        const MapOptions& opts = {}, double step_scale = 1e-6);

} // namespace billiard

#endif
