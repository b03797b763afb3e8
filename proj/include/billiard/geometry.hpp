#ifndef BILLIARD_GEOMETRY_HPP
#define BILLIARD_GEOMETRY_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "billiard/errors.hpp"
#include "billiard/trig_series.hpp"

namespace billiard {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

/// Curvature and its first arclength derivatives at a boundary point:
/// values[j] = d^j kappa / ds^j, units length^{-1-j}.
struct CurvatureJet {
    std::vector<double> values;
    double kappa() const { return values[0]; }
    double operator[](size_t j) const { return values[j]; }
    size_t order() const { return values.size() - 1; }
};

struct BoundaryPoint {
    Vec2 position;
    double tangent_angle = 0.0; // theta + pi/2 (counterclockwise orientation)
    double arclength = 0.0;
};

/// One frequency of a support-function description: a cos(n t) + b sin(n t).
struct SupportMode {
    int n = 0;
    double a = 0.0;
    double b = 0.0;
};

/// Parsed domain description (mirrors the JSON spec file).
struct DomainSpec {
    enum class Kind { Circle, Ellipse, SupportFourier };
    Kind kind = Kind::Circle;
    double radius = 1.0;            // circle
    double semi_major = 1.0;        // ellipse
    double semi_minor = 1.0;        // ellipse
    double a0 = 1.0;                // support_fourier constant term
    std::vector<SupportMode> modes; // support_fourier, frequencies >= 2
    int nodes = 1024;
};

/// A strictly convex planar table given by a truncated trigonometric support
/// function h(theta). The radius of curvature is rho = h + h'' and must be
/// strictly positive; frequency n = 1 is excluded to pin down translations.
///
/// Immutable after construction; every method is a pure function of
/// (domain, arguments) and safe for unsynchronized concurrent use.
class SupportDomain {
public:
    static constexpr int kMaxJetOrder = 8;

    int mode_count() const { return h_.degree(); }
    int node_count() const { return nodes_; }
    double perimeter() const { return perimeter_; }
    double min_radius_of_curvature() const { return rho_min_; }
    double max_radius_of_curvature() const { return rho_max_; }

    double support(double theta) const { return h_.evaluate(theta); }
    double radius_of_curvature(double theta) const { return rho_.evaluate(theta); }

    /// Cumulative arclength s(theta) with s(0) = 0, lifted so that
    /// s(theta + 2 pi) = s(theta) + perimeter.
    double arclength(double theta) const;

    /// Inverse of the arclength map, lifted the same way.
    double theta_from_arclength(double s) const;

    BoundaryPoint boundary_point(double theta) const;

    /// kappa and its arclength derivatives up to `order` (<= kMaxJetOrder),
    /// via the recurrence D_s = rho^{-1} D_theta on exact theta-derivatives.
    CurvatureJet curvature_jet(double theta, int order) const;

    /// Lazutkin cumulative weight L(theta) = int_0^theta rho^{1/3}, lifted.
    /// Used to seed orbit solvers; accuracy is grid-level, not spectral.
    double lazutkin_weight(double theta) const;
    double lazutkin_total() const { return lazutkin_total_; }
    double theta_from_lazutkin(double target) const;

    const TrigSeries& support_series() const { return h_; }
    const TrigSeries& curvature_radius_series() const { return rho_; }

    /// FNV-1a hash of the canonical coefficient list plus node count; keys
    /// orbit caches.
    uint64_t hash() const { return hash_; }

    /// Same body rotated by delta / reflected across the x-axis / re-gridded.
    SupportDomain rotated(double delta) const;
    SupportDomain reflected() const;
    SupportDomain with_node_count(int nodes) const;

    friend SupportDomain build_domain(const DomainSpec& spec);

private:
    SupportDomain(TrigSeries h, int nodes);

    TrigSeries h_;
    TrigSeries rho_;       // h + h''
    int nodes_ = 0;
    double perimeter_ = 0.0;
    double rho_min_ = 0.0;
    double rho_max_ = 0.0;
    double lazutkin_total_ = 0.0;
    std::vector<double> s_nodes_;        // s at theta_j = 2 pi j / N, j = 0..N
    std::vector<double> lazutkin_nodes_; // L at the refined grid (4N+1 points)
    uint64_t hash_ = 0;
};

/// Validates and builds a domain. Throws BadSpec for malformed descriptions
/// and ConvexityViolation when min rho <= 1e-6 * max rho on the node grid or
/// on a 4x refined grid.
SupportDomain build_domain(const DomainSpec& spec);

SupportDomain make_circle(double radius, int nodes = 1024);
SupportDomain make_ellipse(double semi_major, double semi_minor, int nodes = 1024);
SupportDomain make_support_fourier(double a0, const std::vector<SupportMode>& modes,
                                   int nodes = 1024);

/// Closed boundary integral of f(jet) ds by the N-node periodic trapezoid
/// rule in theta with weight rho (spectrally accurate for smooth periodic
/// integrands). jet_order controls how many curvature derivatives the
/// integrand may read. Throws NonFiniteIntegrand on NaN/Inf values.
double integrate_boundary(const SupportDomain& domain, int jet_order,
                          const std::function<double(const CurvatureJet&)>& integrand);

} // namespace billiard

#endif
