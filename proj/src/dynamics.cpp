#include "billiard/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace billiard {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPi = std::numbers::pi;

double wrap_arclength(double lift, double perimeter) {
    return lift - perimeter * std::floor(lift / perimeter);
}

Vec2 unit_tangent(double theta) { return {-std::sin(theta), std::cos(theta)}; }

struct Advance {
    double theta_next = 0.0; // lifted, in (theta, theta + 2 pi)
    double phi_next = 0.0;
    double arc = 0.0; // arclength advance, in (0, perimeter)
};

/// Next boundary intersection of the ray leaving x(theta) at angle phi to
/// the forward tangent. The signed distance of x(t) from the ray line,
/// F(t) = cross(d, x(t) - A), is negative on (theta, theta*) and positive on
/// (theta*, theta + 2 pi); the turning identity theta* - theta = phi + phi'
/// confines theta* to (theta + phi, theta + phi + pi).
Advance advance_ray(const SupportDomain& domain, double theta, double phi,
                    const MapOptions& opts) {
    const double c = std::cos(theta), s = std::sin(theta);
    const Vec2 tangent = unit_tangent(theta);
    const Vec2 inward = {-c, -s};
    const Vec2 d = {std::cos(phi) * tangent.x + std::sin(phi) * inward.x,
                    std::cos(phi) * tangent.y + std::sin(phi) * inward.y};
    const Vec2 origin = domain.boundary_point(theta).position;

    auto line_dist = [&](double t) {
        return cross(d, domain.boundary_point(t).position - origin);
    };
    auto line_dist_deriv = [&](double t) {
        return domain.radius_of_curvature(t) * cross(d, unit_tangent(t));
    };

    double lo = theta + std::max(0.5 * phi, 1e-9);
    double hi = theta + kTwoPi - 1e-7;

    // Coarse scan over the node grid inside [lo, hi] to tighten the bracket.
    const int n = domain.node_count();
    const double step = kTwoPi / n;
    double t_prev = lo;
    double f_prev = line_dist(lo);
    for (double t = std::ceil(lo / step) * step; t < hi; t += step) {
        const double f = line_dist(t);
        if (f_prev < 0.0 && f >= 0.0) {
            hi = t;
            lo = t_prev;
            break;
        }
        t_prev = t;
        f_prev = f;
    }

    // Safeguarded Newton on the bracket.
    double f_lo = line_dist(lo);
    double f_hi = line_dist(hi);
    if (!(f_lo < 0.0) || !(f_hi > 0.0)) {
        // Bracket endpoints degenerate (extremely thin chords); fall back to
        // the full interval.
        lo = theta + std::max(0.5 * phi, 1e-9);
        hi = theta + kTwoPi - 1e-7;
        f_lo = line_dist(lo);
        f_hi = line_dist(hi);
    }
    double t = 0.5 * (lo + hi);
    double f = line_dist(t);
    const double tol = opts.residual_scale * domain.perimeter();
    for (int it = 0; it < opts.max_iter; ++it) {
        if (f < 0.0)
            lo = t;
        else
            hi = t;
        const double df = line_dist_deriv(t);
        double next = (df != 0.0) ? t - f / df : 0.5 * (lo + hi);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        const double dt = std::abs(next - t);
        t = next;
        f = line_dist(t);
        // run to roundoff resolution in theta: the angle error feeds phi'
        // directly and accumulates along trajectories
        if (dt <= 4e-16 * (1.0 + std::abs(t))) break;
    }
    if (std::abs(f) > tol)
        throw NoConvergence("ray-boundary intersection residual " + std::to_string(f));

    Advance adv;
    adv.theta_next = t;
    adv.phi_next = (t - theta) - phi;
    adv.arc = domain.arclength(t) - domain.arclength(theta);
    return adv;
}

} // namespace

Chord generating_function(const SupportDomain& domain, double s, double sp) {
    const double theta_a = domain.theta_from_arclength(s);
    const double theta_b = domain.theta_from_arclength(sp);
    const Vec2 a = domain.boundary_point(theta_a).position;
    const Vec2 b = domain.boundary_point(theta_b).position;
    const Vec2 diff = b - a;
    const double len = norm(diff);
    if (len < 1e-12 * domain.perimeter())
        throw CoincidentPoints("chord endpoints coincide");
    const Vec2 u = {diff.x / len, diff.y / len};
    const Vec2 ta = unit_tangent(theta_a);
    const Vec2 tb = unit_tangent(theta_b);

    Chord chord;
    chord.length = len;
    chord.d_s = dot(u, ta);         // = cos phi at the departure end
    chord.d_sp = -dot(u, tb);       // = -cos phi' at the arrival end
    const double sin_a = cross(ta, u);  // both sines positive: the chord
    const double sin_b = cross(u, tb);  // enters the interior at each end
    chord.d_ssp = -sin_a * sin_b / len;
    return chord;
}

BilliardState make_state(const SupportDomain& domain, double s, double phi) {
    return {wrap_arclength(s, domain.perimeter()), phi, s};
}

BilliardState billiard_map(const SupportDomain& domain, const BilliardState& state,
                           const MapOptions& opts) {
    if (!(state.phi >= opts.phi_min) || !(state.phi <= kPi - opts.phi_min))
        throw TangencyGuard("phi = " + std::to_string(state.phi) +
                            " outside guard band (square-root singularity at the tangency)");
    const double theta = domain.theta_from_arclength(state.lift_s);
    const Advance adv = advance_ray(domain, theta, state.phi, opts);
    BilliardState next;
    next.lift_s = state.lift_s + adv.arc;
    next.s = wrap_arclength(next.lift_s, domain.perimeter());
    next.phi = adv.phi_next;
    return next;
}

BilliardState billiard_map_inverse(const SupportDomain& domain, const BilliardState& state,
                                   const MapOptions& opts) {
    if (!(state.phi >= opts.phi_min) || !(state.phi <= kPi - opts.phi_min))
        throw TangencyGuard("phi outside guard band");
    const double theta = domain.theta_from_arclength(state.lift_s);
    const Advance adv = advance_ray(domain, theta, kPi - state.phi, opts);
    BilliardState prev;
    prev.lift_s = state.lift_s - (domain.perimeter() - adv.arc);
    prev.s = wrap_arclength(prev.lift_s, domain.perimeter());
    prev.phi = kPi - adv.phi_next;
    return prev;
}

std::vector<BilliardState> iterate(const SupportDomain& domain, const BilliardState& start,
                                   long n, const MapOptions& opts) {
    std::vector<BilliardState> traj;
    traj.reserve(static_cast<size_t>(std::abs(n)) + 1);
    traj.push_back(start);
    for (long k = 0; k < std::abs(n); ++k)
        traj.push_back(n > 0 ? billiard_map(domain, traj.back(), opts)
                             : billiard_map_inverse(domain, traj.back(), opts));
    return traj;
}

double map_jacobian_det(const SupportDomain& domain, double s, double phi,
                        const MapOptions& opts, double step_scale) {
    const double hs = step_scale * domain.perimeter();
    const double hu = step_scale;
    const double u = std::cos(phi);
    auto image = [&](double s_in, double u_in) {
        const BilliardState out =
            billiard_map(domain, make_state(domain, s_in, std::acos(std::clamp(u_in, -1.0, 1.0))),
                         opts);
        // lift-based s' keeps the difference quotients continuous across wraps
        return std::pair<double, double>{out.lift_s, std::cos(out.phi)};
    };
    const auto [sp_sp, up_sp] = image(s + hs, u);
    const auto [sp_sm, up_sm] = image(s - hs, u);
    const auto [sp_up, up_up] = image(s, u + hu);
    const auto [sp_um, up_um] = image(s, u - hu);
    const double dsds = (sp_sp - sp_sm) / (2.0 * hs);
    const double duds = (up_sp - up_sm) / (2.0 * hs);
    const double dsdu = (sp_up - sp_um) / (2.0 * hu);
    const double dudu = (up_up - up_um) / (2.0 * hu);
    return dsds * dudu - dsdu * duds;
}

double twist_check(const SupportDomain& domain, int sample_count, unsigned seed,
                   double phi_min) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double ell = domain.perimeter();
    double min_twist = std::numeric_limits<double>::infinity();
    int accepted = 0;
    long attempts = 0;
    const long max_attempts = 50L * sample_count + 1000;
    while (accepted < sample_count && attempts++ < max_attempts) {
        const double s = ell * uni(rng);
        const double sp = s + ell * uni(rng);
        Chord chord;
        try {
            chord = generating_function(domain, s, sp);
        } catch (const CoincidentPoints&) {
            continue;
        }
        const double phi_a = std::acos(std::clamp(chord.d_s, -1.0, 1.0));
        const double phi_b = std::acos(std::clamp(-chord.d_sp, -1.0, 1.0));
        if (std::min(phi_a, kPi - phi_a) < phi_min || std::min(phi_b, kPi - phi_b) < phi_min)
            continue; // near-tangent chord, excluded by the guard band
        min_twist = std::min(min_twist, -chord.d_ssp);
        ++accepted;
    }
    return min_twist;
}

} // namespace billiard
