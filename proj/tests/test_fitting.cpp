#include <doctest.h>

#include <cmath>
#include <numbers>

#include "billiard/fitting.hpp"

using namespace billiard;

namespace {
constexpr double kPi = std::numbers::pi;

/// Exact concentric-caustic data for circle(R): |Gamma| = 2 pi R cos(pi w),
/// Q = 2R (sin(pi w) - pi w cos(pi w)).
std::vector<CausticEstimate> circle_closed_form(double radius, int q_min, int q_max) {
    std::vector<CausticEstimate> out;
    for (int q = q_min; q <= q_max; ++q) {
        const double w = 1.0 / q;
        CausticEstimate e;
        e.omega_mid = w;
        e.gamma_length = 2.0 * kPi * radius * std::cos(kPi * w);
        e.lazutkin_Q = 2.0 * radius * (std::sin(kPi * w) - kPi * w * std::cos(kPi * w));
        e.fd_order = 0;
        e.err_bar = 0.0;
        out.push_back(e);
    }
    return out;
}

double leading_coefficient(double radius) {
    return -std::pow(1.5, 2.0 / 3.0) * kPi * std::cbrt(radius);
}
} // namespace

TEST_CASE("circle closed-form data recovers the leading coefficient") {
    const double ell = 2.0 * kPi;
    const ExpansionFit fit = fit_expansion(circle_closed_form(1.0, 16, 128), ell, 2);
    CHECK(fit.coefficients[0] == doctest::Approx(leading_coefficient(1.0)).epsilon(0.01));
    CHECK(fit.coefficients[0] < 0.0);
    CHECK(fit.condition_number < 1e12);
    CHECK(fit.n_samples == 113);
}

TEST_CASE("order-3 fit on a wide window sits at quadrature noise") {
    const double ell = 2.0 * kPi;
    const ExpansionFit fit = fit_expansion(circle_closed_form(1.0, 32, 256), ell, 3);
    CHECK(fit.residual_rms < 1e-8 * ell);
    CHECK(fit.coefficients[0] == doctest::Approx(leading_coefficient(1.0)).epsilon(1e-4));
}

TEST_CASE("zero defect data fits to zero coefficients") {
    std::vector<CausticEstimate> flat;
    for (int q = 8; q <= 24; ++q) {
        CausticEstimate e;
        e.omega_mid = 1.0 / q;
        e.gamma_length = 2.0 * kPi; // y = gamma - ell = 0
        e.lazutkin_Q = 1.0 / (q * q * q);
        flat.push_back(e);
    }
    const ExpansionFit fit = fit_expansion(flat, 2.0 * kPi, 2);
    CHECK(std::abs(fit.coefficients[0]) < 1e-12);
    CHECK(std::abs(fit.coefficients[1]) < 1e-12);
    CHECK(fit.residual_rms < 1e-14);
}

TEST_CASE("leading coefficient scales as the cube root of the radius") {
    const ExpansionFit unit = fit_expansion(circle_closed_form(1.0, 16, 128), 2.0 * kPi, 2);
    const ExpansionFit twice =
        fit_expansion(circle_closed_form(2.0, 16, 128), 4.0 * kPi, 2);
    CHECK(twice.coefficients[0] / unit.coefficients[0] ==
          doctest::Approx(std::cbrt(2.0)).epsilon(1e-4));
}

TEST_CASE("dropping the largest-Q quarter barely moves c1") {
    const auto all = circle_closed_form(1.0, 16, 128);
    const auto trimmed = std::vector<CausticEstimate>(all.begin() + all.size() / 4, all.end());
    const double c_all = fit_expansion(all, 2.0 * kPi, 2).coefficients[0];
    const double c_trim = fit_expansion(trimmed, 2.0 * kPi, 2).coefficients[0];
    CHECK(std::abs(c_trim - c_all) < 0.01 * std::abs(c_all));
}

TEST_CASE("ratio table is domain independent on closed-form circles") {
    const ExpansionFit fit1 = fit_expansion(circle_closed_form(1.0, 16, 128), 2.0 * kPi, 2);
    const ExpansionFit fit2 = fit_expansion(circle_closed_form(2.0, 16, 128), 4.0 * kPi, 2);
    InvariantVector inv1, inv2;
    inv1.values = {2.0 * kPi, 2.0 * kPi, 18.0 * kPi, 18.0 * kPi, 281.0 * kPi / 22400.0};
    // dilation: I_k(R) = R^{1-2k/3} I_k(1)
    for (int k = 0; k <= 4; ++k)
        inv2.values[static_cast<size_t>(k)] =
            std::pow(2.0, 1.0 - 2.0 * k / 3.0) * inv1.values[static_cast<size_t>(k)];
    const auto ratios = ratio_consistency({fit1, fit2}, {inv1, inv2}, 1);
    REQUIRE(ratios.size() == 2);
    CHECK_FALSE(ratios[0].indeterminate);
    CHECK_FALSE(ratios[1].indeterminate);
    CHECK(ratios[0].ratio == doctest::Approx(ratios[1].ratio).epsilon(1e-6));
    // the universal constant for the leading order
    CHECK(ratios[0].ratio == doctest::Approx(-0.5 * std::pow(1.5, 2.0 / 3.0)).epsilon(1e-3));
}

TEST_CASE("coefficients below fit noise are flagged indeterminate") {
    // y exactly linear in u: the quadratic coefficient is pure noise
    std::vector<CausticEstimate> linear;
    for (int q = 8; q <= 32; ++q) {
        CausticEstimate e;
        e.omega_mid = 1.0 / q;
        e.lazutkin_Q = 8.0 / (q * q * q);
        const double u = std::pow(e.lazutkin_Q, 2.0 / 3.0);
        e.gamma_length = 2.0 * kPi - 3.0 * u;
        e.err_bar = 1e-6; // honest noise scale
        linear.push_back(e);
    }
    const ExpansionFit fit = fit_expansion(linear, 2.0 * kPi, 2);
    InvariantVector inv;
    inv.values = {2.0 * kPi, 2.0 * kPi, 18.0 * kPi, 18.0 * kPi, 281.0 * kPi / 22400.0};
    const auto ratios = ratio_consistency({fit}, {inv}, 2);
    CHECK(ratios[0].indeterminate);
    const auto lead = ratio_consistency({fit}, {inv}, 1);
    CHECK_FALSE(lead[0].indeterminate);
}

TEST_CASE("fit input validation") {
    const auto samples = circle_closed_form(1.0, 16, 20);
    CHECK_THROWS_AS(fit_expansion(samples, 2.0 * kPi, 4), InsufficientSamples);
    CHECK_THROWS_AS(fit_expansion(samples, 2.0 * kPi, 0), BadSpec);

    auto dup = samples;
    for (auto& e : dup) e.lazutkin_Q = 0.5; // all identical
    CHECK_THROWS_AS(fit_expansion(dup, 2.0 * kPi, 2), InsufficientSamples);

    auto bad = samples;
    bad[0].lazutkin_Q = -1.0;
    CHECK_THROWS_AS(fit_expansion(bad, 2.0 * kPi, 2), BadSpec);

    // nearly coincident Q values blow up the normal system
    auto narrow = circle_closed_form(1.0, 16, 20);
    for (size_t i = 0; i < narrow.size(); ++i)
        narrow[i].lazutkin_Q = 1e-3 * (1.0 + 1e-13 * static_cast<double>(i));
    CHECK_THROWS_AS(fit_expansion(narrow, 2.0 * kPi, 3), IllConditioned);
}
