#include "billiard/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <numbers>

namespace billiard {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Margin for the strict-convexity check: reject min rho < margin * max rho.
constexpr double kConvexityMargin = 1e-6;

uint64_t fnv1a(const void* data, size_t size, uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t hash_double(double x, uint64_t h) {
    uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    return fnv1a(&bits, sizeof bits, h);
}

double binom(int n, int k) {
    static const auto table = [] {
        std::array<std::array<double, SupportDomain::kMaxJetOrder + 2>,
                   SupportDomain::kMaxJetOrder + 2>
            t{};
        for (int i = 0; i <= SupportDomain::kMaxJetOrder + 1; ++i) {
            t[i][0] = 1.0;
            for (int j = 1; j <= i; ++j)
                t[i][j] = t[i - 1][j - 1] + (j <= i - 1 ? t[i - 1][j] : 0.0);
        }
        return t;
    }();
    return table[static_cast<size_t>(n)][static_cast<size_t>(k)];
}

// rho = h + h'': mode n of h contributes (1 - n^2) times itself.
TrigSeries curvature_radius_from_support(const TrigSeries& h) {
    std::vector<double> c(static_cast<size_t>(h.degree()) + 1);
    std::vector<double> s(c.size(), 0.0);
    for (int n = 0; n <= h.degree(); ++n) {
        const double f = 1.0 - static_cast<double>(n) * static_cast<double>(n);
        c[static_cast<size_t>(n)] = f * h.cos_coef(n);
        s[static_cast<size_t>(n)] = f * h.sin_coef(n);
    }
    return TrigSeries(std::move(c), std::move(s));
}

} // namespace

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

SupportDomain::SupportDomain(TrigSeries h, int nodes) : h_(std::move(h)), nodes_(nodes) {
    if (nodes_ < 32 || nodes_ < 2 * (h_.degree() + 1))
        throw BadSpec("node_count must be >= 32 and resolve every retained mode");
    rho_ = curvature_radius_from_support(h_);
    perimeter_ = kTwoPi * h_.cos_coef(0);
    if (!(perimeter_ > 0.0)) throw BadSpec("support constant term must be positive");

    // Strict convexity on the node grid and a 4x refined grid.
    const int refined = 4 * nodes_;
    rho_min_ = rho_.evaluate(0.0);
    rho_max_ = rho_min_;
    for (int j = 1; j < refined; ++j) {
        const double r = rho_.evaluate(kTwoPi * j / refined);
        rho_min_ = std::min(rho_min_, r);
        rho_max_ = std::max(rho_max_, r);
    }
    if (!(rho_min_ > kConvexityMargin * rho_max_))
        throw ConvexityViolation("radius of curvature h + h'' is not strictly positive");

    s_nodes_.resize(static_cast<size_t>(nodes_) + 1);
    for (int j = 0; j <= nodes_; ++j)
        s_nodes_[static_cast<size_t>(j)] = rho_.integral_from_zero(kTwoPi * j / nodes_);
    s_nodes_.back() = perimeter_;

    // Cumulative Lazutkin weight int rho^{1/3} on the refined grid; trapezoid
    // accuracy is enough since this only seeds orbit solvers.
    lazutkin_nodes_.resize(static_cast<size_t>(refined) + 1);
    lazutkin_nodes_[0] = 0.0;
    const double dt = kTwoPi / refined;
    double prev = std::cbrt(rho_.evaluate(0.0));
    for (int j = 1; j <= refined; ++j) {
        const double cur = std::cbrt(rho_.evaluate(dt * j));
        lazutkin_nodes_[static_cast<size_t>(j)] =
            lazutkin_nodes_[static_cast<size_t>(j - 1)] + 0.5 * dt * (prev + cur);
        prev = cur;
    }
    lazutkin_total_ = lazutkin_nodes_.back();

    uint64_t h64 = 1469598103934665603ull;
    for (int n = 0; n <= h_.degree(); ++n) {
        h64 = hash_double(h_.cos_coef(n), h64);
        h64 = hash_double(h_.sin_coef(n), h64);
    }
    h64 = fnv1a(&nodes_, sizeof nodes_, h64);
    hash_ = h64;
}

double SupportDomain::arclength(double theta) const {
    const double turns = std::floor(theta / kTwoPi);
    const double frac = theta - kTwoPi * turns;
    return turns * perimeter_ + rho_.integral_from_zero(frac);
}

double SupportDomain::theta_from_arclength(double s) const {
    const double turns = std::floor(s / perimeter_);
    const double r = s - turns * perimeter_;
    // Bracket on the node table, then safeguarded Newton with derivative
    // rho > 0; drive the residual to roundoff so downstream finite-difference
    // oracles see no inversion noise.
    const auto it = std::upper_bound(s_nodes_.begin(), s_nodes_.end(), r);
    const size_t hi = std::min(static_cast<size_t>(it - s_nodes_.begin()), s_nodes_.size() - 1);
    const size_t lo = hi - 1;
    double t_lo = kTwoPi * static_cast<double>(lo) / nodes_;
    double t_hi = kTwoPi * static_cast<double>(hi) / nodes_;
    const double w = (r - s_nodes_[lo]) / (s_nodes_[hi] - s_nodes_[lo]);
    double t = t_lo + w * (t_hi - t_lo);
    const double f_tol = 1e-16 * perimeter_;
    for (int iter = 0; iter < 100; ++iter) {
        const double f = rho_.integral_from_zero(t) - r;
        if (std::abs(f) < f_tol) break;
        if (f > 0.0)
            t_hi = t;
        else
            t_lo = t;
        double next = t - f / rho_.evaluate(t);
        if (!(next > t_lo) || !(next < t_hi)) next = 0.5 * (t_lo + t_hi);
        if (next == t || !(t_hi - t_lo > 1e-17)) break;
        t = next;
    }
    return turns * kTwoPi + t;
}

BoundaryPoint SupportDomain::boundary_point(double theta) const {
    double hj[2];
    h_.evaluate_jet(theta, 1, hj);
    const double c = std::cos(theta), s = std::sin(theta);
    BoundaryPoint p;
    p.position = {hj[0] * c - hj[1] * s, hj[0] * s + hj[1] * c};
    p.tangent_angle = theta + 0.5 * std::numbers::pi;
    p.arclength = arclength(theta);
    return p;
}

CurvatureJet SupportDomain::curvature_jet(double theta, int order) const {
    if (order < 0 || order > kMaxJetOrder)
        throw OrderTooHigh("curvature jet order must be in [0, 8]");
    double rj[kMaxJetOrder + 1];
    rho_.evaluate_jet(theta, order, rj);

    // theta-jet of g = 1/rho from Leibniz on g * rho = 1.
    std::array<double, kMaxJetOrder + 1> g{};
    g[0] = 1.0 / rj[0];
    for (int n = 1; n <= order; ++n) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
            acc += binom(n, k) * g[static_cast<size_t>(k)] * rj[n - k];
        g[static_cast<size_t>(n)] = -g[0] * acc;
    }

    // kappa_m = (g d/dtheta)^m kappa, carried as theta-jets of shrinking
    // length; kappa itself is g.
    CurvatureJet jet;
    jet.values.reserve(static_cast<size_t>(order) + 1);
    std::vector<double> cur(g.begin(), g.begin() + order + 1);
    jet.values.push_back(cur[0]);
    for (int m = 1; m <= order; ++m) {
        const int len = order - m;
        std::vector<double> next(static_cast<size_t>(len) + 1, 0.0);
        for (int i = 0; i <= len; ++i) {
            double acc = 0.0;
            for (int k = 0; k <= i; ++k)
                acc += binom(i, k) * g[static_cast<size_t>(k)] *
                       cur[static_cast<size_t>(i - k + 1)];
            next[static_cast<size_t>(i)] = acc;
        }
        cur = std::move(next);
        jet.values.push_back(cur[0]);
    }
    return jet;
}

double SupportDomain::lazutkin_weight(double theta) const {
    const double turns = std::floor(theta / kTwoPi);
    const double frac = theta - kTwoPi * turns;
    const double step = kTwoPi / static_cast<double>(lazutkin_nodes_.size() - 1);
    const double pos = frac / step;
    const size_t j = std::min(static_cast<size_t>(pos), lazutkin_nodes_.size() - 2);
    const double w = pos - static_cast<double>(j);
    return turns * lazutkin_total_ + (1.0 - w) * lazutkin_nodes_[j] + w * lazutkin_nodes_[j + 1];
}

double SupportDomain::theta_from_lazutkin(double target) const {
    const double turns = std::floor(target / lazutkin_total_);
    const double r = target - turns * lazutkin_total_;
    const auto it = std::upper_bound(lazutkin_nodes_.begin(), lazutkin_nodes_.end(), r);
    const size_t hi =
        std::min(static_cast<size_t>(it - lazutkin_nodes_.begin()), lazutkin_nodes_.size() - 1);
    const size_t lo = hi - 1;
    const double step = kTwoPi / static_cast<double>(lazutkin_nodes_.size() - 1);
    const double w = (r - lazutkin_nodes_[lo]) / (lazutkin_nodes_[hi] - lazutkin_nodes_[lo]);
    return turns * kTwoPi + step * (static_cast<double>(lo) + w);
}

SupportDomain SupportDomain::rotated(double delta) const {
    return SupportDomain(h_.rotated(delta), nodes_);
}

SupportDomain SupportDomain::reflected() const {
    return SupportDomain(h_.reflected(), nodes_);
}

SupportDomain SupportDomain::with_node_count(int nodes) const {
    return SupportDomain(h_, nodes);
}

namespace {

TrigSeries project_ellipse_support(double a, double b) {
    // h(theta) = sqrt(a^2 cos^2 + b^2 sin^2) is analytic, so its Fourier
    // coefficients decay geometrically. rho = h + h'' amplifies a dropped
    // mode n by n^2, so the projection is accumulated in long double and
    // truncated near the extended-precision floor.
    constexpr int kSamples = 8192;
    std::vector<long double> h(kSamples), ct(kSamples), st(kSamples);
    for (int j = 0; j < kSamples; ++j) {
        const long double t = 2.0L * 3.14159265358979323846264338328L * j / kSamples;
        ct[static_cast<size_t>(j)] = cosl(t);
        st[static_cast<size_t>(j)] = sinl(t);
        const long double c = ct[static_cast<size_t>(j)], s = st[static_cast<size_t>(j)];
        h[static_cast<size_t>(j)] =
            sqrtl(static_cast<long double>(a) * a * c * c + static_cast<long double>(b) * b * s * s);
    }
    long double a0 = 0.0L;
    for (long double v : h) a0 += v;
    a0 /= kSamples;

    const double eps = static_cast<double>(3e-17L * std::max<long double>(a0, 1.0L));
    std::vector<double> cc = {static_cast<double>(a0)}, ss = {0.0};
    int below = 0;
    for (int n = 1; n <= kSamples / 4 && below < 8; ++n) {
        long double an = 0.0L, bn = 0.0L;
        for (int j = 0; j < kSamples; ++j) {
            const size_t idx = static_cast<size_t>((static_cast<long long>(n) * j) % kSamples);
            an += h[static_cast<size_t>(j)] * ct[idx];
            bn += h[static_cast<size_t>(j)] * st[idx];
        }
        an *= 2.0L / kSamples;
        bn *= 2.0L / kSamples;
        cc.push_back(static_cast<double>(an));
        ss.push_back(static_cast<double>(bn));
        below = (std::abs(cc.back()) < eps && std::abs(ss.back()) < eps) ? below + 1 : 0;
    }
    // A centered ellipse has no frequency-1 content; scrub projection noise.
    if (cc.size() > 1) {
        cc[1] = 0.0;
        ss[1] = 0.0;
    }
    TrigSeries series(std::move(cc), std::move(ss));
    series.truncate(eps);
    return series;
}

} // namespace

SupportDomain build_domain(const DomainSpec& spec) {
    switch (spec.kind) {
    case DomainSpec::Kind::Circle: {
        if (!(spec.radius > 0.0)) throw BadSpec("circle radius must be positive");
        return SupportDomain(TrigSeries({spec.radius}, {0.0}), spec.nodes);
    }
    case DomainSpec::Kind::Ellipse: {
        if (!(spec.semi_major > 0.0) || !(spec.semi_minor > 0.0))
            throw BadSpec("ellipse semi-axes must be positive");
        return SupportDomain(project_ellipse_support(spec.semi_major, spec.semi_minor),
                             spec.nodes);
    }
    case DomainSpec::Kind::SupportFourier: {
        if (!(spec.a0 > 0.0)) throw BadSpec("a0 must be positive");
        int maxn = 0;
        for (const auto& m : spec.modes) {
            if (m.n == 1) throw BadSpec("frequency 1 is excluded (translations are fixed)");
            if (m.n < 2 || m.n > 4096) throw BadSpec("mode frequency out of range");
            if (!std::isfinite(m.a) || !std::isfinite(m.b))
                throw BadSpec("non-finite mode coefficient");
            maxn = std::max(maxn, m.n);
        }
        std::vector<double> cc(static_cast<size_t>(maxn) + 1, 0.0);
        std::vector<double> ss(cc.size(), 0.0);
        cc[0] = spec.a0;
        for (const auto& m : spec.modes) {
            if (cc[static_cast<size_t>(m.n)] != 0.0 || ss[static_cast<size_t>(m.n)] != 0.0)
                throw BadSpec("duplicate mode frequency");
            cc[static_cast<size_t>(m.n)] = m.a;
            ss[static_cast<size_t>(m.n)] = m.b;
        }
        return SupportDomain(TrigSeries(std::move(cc), std::move(ss)), spec.nodes);
    }
    }
    throw BadSpec("unknown domain kind");
}

SupportDomain make_circle(double radius, int nodes) {
    DomainSpec spec;
    spec.kind = DomainSpec::Kind::Circle;
    spec.radius = radius;
    spec.nodes = nodes;
    return build_domain(spec);
}

SupportDomain make_ellipse(double semi_major, double semi_minor, int nodes) {
    DomainSpec spec;
    spec.kind = DomainSpec::Kind::Ellipse;
    spec.semi_major = semi_major;
    spec.semi_minor = semi_minor;
    spec.nodes = nodes;
    return build_domain(spec);
}

SupportDomain make_support_fourier(double a0, const std::vector<SupportMode>& modes, int nodes) {
    DomainSpec spec;
    spec.kind = DomainSpec::Kind::SupportFourier;
    spec.a0 = a0;
    spec.modes = modes;
    spec.nodes = nodes;
    return build_domain(spec);
}

double integrate_boundary(const SupportDomain& domain, int jet_order,
                          const std::function<double(const CurvatureJet&)>& integrand) {
    const int n = domain.node_count();
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        const double theta = kTwoPi * j / n;
        const CurvatureJet jet = domain.curvature_jet(theta, jet_order);
        const double f = integrand(jet);
        if (!std::isfinite(f))
            throw NonFiniteIntegrand("integrand not finite at theta = " + std::to_string(theta));
        sum += f / jet.kappa(); // weight rho = 1/kappa
    }
    return sum * kTwoPi / n;
}

} // namespace billiard
