#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "billiard/geometry.hpp"
#include "support.hpp"

using namespace billiard;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
} // namespace

TEST_CASE("circle support domain has exact closed forms") {
    const SupportDomain circle = make_circle(1.0, 256);
    CHECK(circle.perimeter() == doctest::Approx(kTwoPi).epsilon(1e-14));
    CHECK(circle.min_radius_of_curvature() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(circle.max_radius_of_curvature() == doctest::Approx(1.0).epsilon(1e-14));

    const BoundaryPoint p0 = circle.boundary_point(0.0);
    CHECK(p0.position.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p0.position.y == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p0.arclength == doctest::Approx(0.0).epsilon(1e-15));

    const BoundaryPoint p1 = circle.boundary_point(kPi / 2.0);
    CHECK(p1.position.x == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p1.position.y == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p1.arclength == doctest::Approx(kPi / 2.0).epsilon(1e-14));
}

TEST_CASE("ellipse projection matches support-free oracles") {
    const SupportDomain ell = make_ellipse(2.0, 1.0, 1024);

    // Perimeter against adaptive quadrature of the parametric arc length.
    const double oracle = billiard::testing::ellipse_perimeter_oracle(2.0, 1.0);
    CHECK(oracle == doctest::Approx(9.6884482205477).epsilon(1e-10));
    CHECK(ell.perimeter() == doctest::Approx(oracle).epsilon(1e-11));

    // Vertex positions and the closed-form vertex curvatures a/b^2, b/a^2.
    const BoundaryPoint v = ell.boundary_point(0.0);
    CHECK(v.position.x == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(v.position.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ell.curvature_jet(0.0, 0).kappa() == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(ell.curvature_jet(kPi / 2.0, 0).kappa() == doctest::Approx(0.25).epsilon(1e-11));
}

TEST_CASE("convexity and spec validation errors") {
    CHECK_THROWS_AS(make_support_fourier(1.0, {{2, 0.6, 0.0}}, 256), ConvexityViolation);
    CHECK_THROWS_AS(make_support_fourier(1.0, {{1, 0.1, 0.0}}, 256), BadSpec);
    CHECK_THROWS_AS(make_support_fourier(-1.0, {}, 256), BadSpec);
    CHECK_THROWS_AS(make_support_fourier(1.0, {{2, 0.01, 0.0}, {2, 0.0, 0.01}}, 256), BadSpec);
    CHECK_THROWS_AS(make_circle(0.0), BadSpec);
    CHECK_THROWS_AS(make_circle(1.0, 8), BadSpec);
    CHECK_THROWS_AS(make_circle(1.0).curvature_jet(0.0, 9), OrderTooHigh);
}

TEST_CASE("curvature jets vanish beyond order zero on circles") {
    const SupportDomain circle = make_circle(1.7, 256);
    const CurvatureJet jet = circle.curvature_jet(1.234, 3);
    CHECK(jet[0] == doctest::Approx(1.0 / 1.7).epsilon(1e-14));
    for (size_t j = 1; j <= 3; ++j) CHECK(std::abs(jet[j]) < 1e-13);
}

TEST_CASE("curvature jets agree with arclength finite differences") {
    const SupportDomain dom =
        make_support_fourier(1.0, {{2, 0.04, -0.02}, {3, 0.0, 0.025}, {5, 0.006, 0.004}}, 1024);
    std::mt19937 rng(12345u);
    std::uniform_real_distribution<double> uni(0.0, kTwoPi);

    auto kappa_at_s = [&](double s, int order) {
        return dom.curvature_jet(dom.theta_from_arclength(s), order).values.back();
    };

    // Scale per order, so the relative comparison stays meaningful where a
    // derivative crosses zero.
    double scale[4] = {0.0, 0.0, 0.0, 0.0};
    std::vector<double> thetas;
    for (int i = 0; i < 32; ++i) thetas.push_back(uni(rng));
    for (double t : thetas) {
        const CurvatureJet jet = dom.curvature_jet(t, 3);
        for (int j = 0; j <= 3; ++j)
            scale[j] = std::max(scale[j], std::abs(jet[static_cast<size_t>(j)]));
    }

    for (double t : thetas) {
        const CurvatureJet jet = dom.curvature_jet(t, 3);
        const double s = dom.arclength(t);
        const double h1 = 1e-5;
        const double fd1 = (kappa_at_s(s + h1, 0) - kappa_at_s(s - h1, 0)) / (2.0 * h1);
        CHECK(std::abs(fd1 - jet[1]) < 1e-6 * std::max(scale[1], 1.0));

        const double h2 = 1e-4;
        const double fd2 =
            (kappa_at_s(s + h2, 0) - 2.0 * kappa_at_s(s, 0) + kappa_at_s(s - h2, 0)) / (h2 * h2);
        CHECK(std::abs(fd2 - jet[2]) < 1e-6 * std::max(scale[2], 1.0));

        // third order stepwise: FD of the exact second derivative
        const double fd3 = (kappa_at_s(s + h1, 2) - kappa_at_s(s - h1, 2)) / (2.0 * h1);
        CHECK(std::abs(fd3 - jet[3]) < 1e-6 * std::max(scale[3], 1.0));
    }
}

TEST_CASE("Gauss-Bonnet holds on every valid domain") {
    std::mt19937 rng(777u);
    for (int trial = 0; trial < 10; ++trial) {
        const SupportDomain dom = billiard::testing::random_convex_domain(rng);
        const double total =
            integrate_boundary(dom, 0, [](const CurvatureJet& j) { return j.kappa(); });
        CHECK(total == doctest::Approx(kTwoPi).epsilon(1e-10));
    }
    const double circle_total =
        integrate_boundary(make_circle(1.0), 0, [](const CurvatureJet& j) { return j.kappa(); });
    CHECK(circle_total == doctest::Approx(kTwoPi).epsilon(1e-13));
}

TEST_CASE("curvature power integrals match closed forms on circles") {
    const SupportDomain big = make_circle(2.0, 512);
    const double val = integrate_boundary(
        big, 0, [](const CurvatureJet& j) { return std::pow(j.kappa(), 2.0 / 3.0); });
    CHECK(val == doctest::Approx(kTwoPi * std::cbrt(2.0)).epsilon(1e-13));
}

TEST_CASE("perimeter, arclength table and quadrature are consistent") {
    std::mt19937 rng(31u);
    const SupportDomain dom = billiard::testing::random_convex_domain(rng);
    const double quad = integrate_boundary(dom, 0, [](const CurvatureJet&) { return 1.0; });
    CHECK(quad == doctest::Approx(dom.perimeter()).epsilon(1e-11));
    CHECK(dom.arclength(kTwoPi) == doctest::Approx(dom.perimeter()).epsilon(1e-13));
}

TEST_CASE("node doubling leaves spectral quadratures fixed") {
    std::mt19937 rng(99u);
    const SupportDomain dom = billiard::testing::random_convex_domain(rng, 0.35, 512);
    const SupportDomain fine = dom.with_node_count(1024);
    auto k23 = [](const CurvatureJet& j) { return std::pow(j.kappa(), 2.0 / 3.0); };
    CHECK(integrate_boundary(dom, 0, k23) ==
          doctest::Approx(integrate_boundary(fine, 0, k23)).epsilon(1e-11));
    CHECK(dom.perimeter() == doctest::Approx(fine.perimeter()).epsilon(1e-13));
}

TEST_CASE("arclength map inverts across lifts") {
    std::mt19937 rng(5150u);
    const SupportDomain dom = billiard::testing::random_convex_domain(rng);
    std::uniform_real_distribution<double> uni(-3.0 * kTwoPi, 3.0 * kTwoPi);
    for (int i = 0; i < 50; ++i) {
        const double theta = uni(rng);
        const double s = dom.arclength(theta);
        CHECK(dom.theta_from_arclength(s) == doctest::Approx(theta).epsilon(1e-11));
    }
    // strictly increasing along the grid
    double prev = dom.arclength(0.0);
    for (int j = 1; j <= 64; ++j) {
        const double cur = dom.arclength(kTwoPi * j / 64.0);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("rotation relabels the boundary without changing geometry") {
    std::mt19937 rng(4242u);
    const SupportDomain dom = billiard::testing::random_convex_domain(rng);
    const double delta = 0.37;
    const SupportDomain rot = dom.rotated(delta);
    CHECK(rot.perimeter() == doctest::Approx(dom.perimeter()).epsilon(1e-14));
    const Vec2 p = dom.boundary_point(1.1).position;
    const Vec2 pr = rot.boundary_point(1.1 + delta).position;
    const double c = std::cos(delta), s = std::sin(delta);
    CHECK(pr.x == doctest::Approx(c * p.x - s * p.y).epsilon(1e-12));
    CHECK(pr.y == doctest::Approx(s * p.x + c * p.y).epsilon(1e-12));
}

TEST_CASE("non-finite integrands are rejected") {
    const SupportDomain circle = make_circle(1.0, 256);
    CHECK_THROWS_AS(integrate_boundary(circle, 0,
                                       [](const CurvatureJet&) {
                                           return std::numeric_limits<double>::quiet_NaN();
                                       }),
                    NonFiniteIntegrand);
}
