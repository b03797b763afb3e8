#ifndef BILLIARD_ORBITS_HPP
#define BILLIARD_ORBITS_HPP

#include <cstdint>
#include <vector>

#include "billiard/dynamics.hpp"
#include "billiard/geometry.hpp"

namespace billiard {

/// Maximal-length Birkhoff periodic orbit of rotation number p/q. The
/// vertices are stored as a strictly increasing lift sequence
/// theta_1 < ... < theta_q < theta_1 + 2 pi p.
struct PeriodicOrbit {
    int p = 0;
    int q = 0;
    std::vector<double> thetas;
    double length = 0.0;
    double residual = 0.0; // max over vertices of |cos phi_out - cos phi_in|
    bool converged = false;
    bool degenerate_family = false; // restarts found equal-length distinct orbits
    int restarts_used = 0;
};

struct OrbitOptions {
    double residual_tol = -1.0; // < 0: use 1e-10 * perimeter
    int max_sweeps = 80;
    int max_newton = 50;
    int restarts = 4;
    unsigned seed = 1729u;
    std::vector<double>* length_trace = nullptr; // per accepted step, for tests
};

inline constexpr int kMaxBounceCount = 512;

/// Maximizes the cyclic chord-length sum over monotone lift configurations,
/// seeded by Lazutkin-uniform spacing (vertices equidistributed in the
/// measure kappa^{2/3} ds), refined by cyclic coordinate ascent and then a
/// full Newton polish of the reflection equations. Requires gcd(p, q) = 1,
/// 2 <= q <= kMaxBounceCount, 1 <= p <= q - 1. Throws OrderCollapse if every
/// restart loses monotonicity and NoConvergence if none reaches tolerance.
PeriodicOrbit solve_orbit(const SupportDomain& domain, int p, int q,
                          const OrbitOptions& opts = {});

/// Follows the billiard map around the orbit and confirms vertex return and
/// a lift advance of p * perimeter, both within 1e-6 * perimeter.
bool validate_rotation_number(const SupportDomain& domain, const PeriodicOrbit& orbit);

/// Marked length spectrum entry: length of the maximal (p,q) orbit. Cached
/// by (domain hash, p, q); safe for concurrent sweeps.
double mls(const SupportDomain& domain, int p, int q);

struct MlsCacheEntry {
    uint64_t domain_hash = 0;
    int p = 0;
    int q = 0;
    double length = 0.0;
};

std::vector<MlsCacheEntry> mls_cache_snapshot();
void mls_cache_merge(const std::vector<MlsCacheEntry>& entries);
void mls_cache_clear();

} // namespace billiard

#endif
