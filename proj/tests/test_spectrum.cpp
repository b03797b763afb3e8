#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "billiard/spectrum.hpp"
#include "support.hpp"

using namespace billiard;

namespace {
constexpr double kPi = std::numbers::pi;

double circle_beta(double omega) { return -2.0 * std::sin(kPi * omega); }
double circle_gamma(double omega) { return 2.0 * kPi * std::cos(kPi * omega); }
double circle_lazutkin(double omega) {
    return 2.0 * (std::sin(kPi * omega) - kPi * omega * std::cos(kPi * omega));
}
} // namespace

TEST_CASE("beta table matches the circle closed form") {
    const SupportDomain circle = make_circle(1.0);
    std::vector<Rational> rotations = {{1, 2}, {1, 3}};
    for (int q = 4; q <= 20; ++q) rotations.push_back({1, q});
    const auto samples = beta_table(circle, rotations);
    CHECK(samples[0].beta == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(samples[1].beta == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-12));
    for (const auto& s : samples) {
        CHECK(s.beta == doctest::Approx(circle_beta(s.omega)).epsilon(1e-10));
        CHECK(s.beta == doctest::Approx(-s.mls_length / s.q).epsilon(1e-15));
        CHECK(s.beta < 0.0);
    }
}

TEST_CASE("beta table validates its rotation numbers") {
    const SupportDomain circle = make_circle(1.0);
    CHECK_THROWS_AS(beta_table(circle, {{2, 4}}), BadSpec);  // not reduced
    CHECK_THROWS_AS(beta_table(circle, {{3, 5}}), BadSpec);  // above 1/2
    CHECK_THROWS_AS(beta_table(circle, {{0, 5}}), BadSpec);
}

TEST_CASE("three-point derivative matches the circle derivative") {
    const SupportDomain circle = make_circle(1.0);
    const int q = 32;
    const auto samples =
        beta_table(circle, {{1, q + 1}, {1, q}, {1, q - 1}});
    const DerivativeEstimate est = beta_derivative(samples[0], samples[1], samples[2]);
    const double exact = -2.0 * kPi * std::cos(kPi / q);
    CHECK(est.omega == doctest::Approx(1.0 / q));
    CHECK(est.three_point == doctest::Approx(exact).epsilon(1e-3));
    CHECK(est.err_bar > 0.0);
    CHECK(std::abs(est.three_point - exact) < est.err_bar);
    CHECK_THROWS_AS(beta_derivative(samples[0], samples[0], samples[2]), InsufficientSamples);
}

TEST_CASE("beta'(0) extrapolates to minus the perimeter") {
    const SupportDomain circle = make_circle(1.0);
    std::vector<Rational> rotations;
    for (int q = 48; q <= 64; ++q) rotations.push_back({1, q});
    const double slope_circle = beta_prime_at_zero(beta_table(circle, rotations));
    CHECK(std::abs(slope_circle + circle.perimeter()) < 1e-3 * circle.perimeter());

    const SupportDomain ell = make_ellipse(2.0, 1.0);
    const double slope_ell = beta_prime_at_zero(beta_table(ell, rotations));
    CHECK(std::abs(slope_ell + ell.perimeter()) < 1e-3 * ell.perimeter());

    CHECK_THROWS_AS(beta_prime_at_zero({}), InsufficientSamples);
}

TEST_CASE("circle caustic estimates match concentric-circle closed forms") {
    const SupportDomain circle = make_circle(1.0);
    const auto estimates = caustic_estimates(circle, 16, 64);
    REQUIRE(estimates.size() == 49);
    double prev_gamma = 0.0, prev_q_param = 1e9;
    for (const auto& e : estimates) {
        const double omega = e.omega_mid;
        CHECK(std::abs(e.gamma_length - circle_gamma(omega)) < 1e-4 * circle_gamma(omega));
        CHECK(std::abs(e.lazutkin_Q - circle_lazutkin(omega)) < 1e-3 * circle_lazutkin(omega));
        CHECK(e.gamma_length < circle.perimeter());
        CHECK(e.lazutkin_Q > 0.0);
        CHECK(e.gamma_length > prev_gamma);
        CHECK(e.lazutkin_Q < prev_q_param);
        prev_gamma = e.gamma_length;
        prev_q_param = e.lazutkin_Q;

        // perimeter defect is Theta(omega^2): ratio to pi^3 omega^2 near 1
        const double defect = circle.perimeter() - e.gamma_length;
        CHECK(defect / (kPi * kPi * kPi * omega * omega) ==
              doctest::Approx(1.0).epsilon(0.05));
    }

    // Q ~ omega^3 to leading order: doubling q shrinks Q by about 8
    const auto q16 = estimates[0];
    const auto q32 = estimates[16];
    CHECK(q16.lazutkin_Q / q32.lazutkin_Q == doctest::Approx(8.0).epsilon(0.1));
}

TEST_CASE("winding-2 caustics match the circle closed forms") {
    // omega = 2/q with q odd; the reduced-rational stencil does the work
    const SupportDomain circle = make_circle(1.0);
    const auto estimates = caustic_estimates(circle, 9, 31, 2);
    REQUIRE(estimates.size() == 12);
    for (const auto& e : estimates) {
        CHECK(std::abs(e.gamma_length - circle_gamma(e.omega_mid)) <
              2e-4 * circle_gamma(e.omega_mid));
        CHECK(std::abs(e.lazutkin_Q - circle_lazutkin(e.omega_mid)) <
              2e-3 * circle_lazutkin(e.omega_mid));
    }
}

TEST_CASE("caustic stencil narrows at the family edge") {
    const SupportDomain circle = make_circle(1.0);
    const auto estimates = caustic_estimates(circle, 3, 8);
    REQUIRE(estimates.size() == 6);
    CHECK(estimates[0].fd_order == 3); // q = 3: no valid q - 2 neighbor
    for (size_t i = 1; i < estimates.size(); ++i) CHECK(estimates[i].fd_order == 5);
    CHECK_THROWS_AS(caustic_estimates(circle, 2, 2), InsufficientSamples);
    CHECK_THROWS_AS(caustic_estimates(circle, 8, 4), BadSpec);
}

TEST_CASE("derivative estimates are rotation invariant") {
    std::mt19937 rng(64u);
    const SupportDomain dom = billiard::testing::random_convex_domain(rng);
    const SupportDomain rot = dom.rotated(0.8123);
    const std::vector<Rational> rotations = {{1, 9}, {1, 8}, {1, 7}};
    const auto sa = beta_table(dom, rotations);
    const auto sb = beta_table(rot, rotations);
    const DerivativeEstimate ea = beta_derivative(sa[0], sa[1], sa[2]);
    const DerivativeEstimate eb = beta_derivative(sb[0], sb[1], sb[2]);
    CHECK(ea.three_point == doctest::Approx(eb.three_point).epsilon(1e-8));
}

TEST_CASE("marking symmetry of beta about one half") {
    std::mt19937 rng(91u);
    const SupportDomain dom = billiard::testing::random_convex_domain(rng);
    for (const auto [p, q] : {std::pair{1, 5}, {2, 7}, {3, 10}}) {
        const double beta_low = -mls(dom, p, q) / q;
        const double beta_high = -mls(dom, q - p, q) / q;
        CHECK(beta_low == doctest::Approx(beta_high).epsilon(1e-8));
    }
}

TEST_CASE("discrete convexity of beta on circle and ellipse") {
    const SupportDomain circle = make_circle(1.0);
    const SupportDomain ell = make_ellipse(2.0, 1.0);
    std::vector<Rational> rotations = {{1, 2}};
    for (int q = 3; q <= 40; ++q) rotations.push_back({1, q});
    for (const SupportDomain* dom : {&circle, &ell}) {
        const auto report = convexity_report(beta_table(*dom, rotations));
        CHECK(report.size() == rotations.size() - 2);
        for (const auto& d : report) CHECK(d.positive);
    }
    // fewer than three samples: nothing to report
    CHECK(convexity_report(beta_table(circle, {{1, 2}, {1, 3}})).empty());
}
