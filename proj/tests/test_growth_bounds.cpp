#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "growthflow/errors.hpp"
#include "growthflow/growth_bounds.hpp"

using namespace growthflow;

namespace {

// Independent value of int_r^inf h^p / s^2 after s = e^u: fixed-order
// Gauss-Kronrod on width-2 panels in u, then Boost's infinite mapping.
double H_oracle(const GrowthBound& h, double r, int p) {
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double u) {
        const double s = std::exp(u);
        return std::isfinite(s) ? std::pow(h(s), p) / s : 0.0;
    };
    double sum = 0.0;
    double lo = std::log(r);
    for (; lo < 60.0; lo += 2.0) sum += gauss_kronrod<double, 61>::integrate(f, lo, lo + 2.0, 4, 1e-12);
    sum += gauss_kronrod<double, 61>::integrate(f, lo, std::numeric_limits<double>::infinity(), 10, 1e-12);
    return sum;
}

}  // namespace

TEST_CASE("tier classification of the built-in bounds") {
    CHECK(validate_tier(power_bound(0.25)).tier >= Tier::WellPosedness);
    CHECK(validate_tier(quarterlog_bound()).tier == Tier::GlobalWellPosedness);
    CHECK(validate_tier(constant_bound()).tier == Tier::GlobalWellPosedness);
    CHECK(validate_tier(linear_bound()).tier == Tier::PreGrowth);

    const TierReport r = validate_tier(power_bound(0.6));
    CHECK(r.tier == Tier::Growth);
    REQUIRE(!r.failures.empty());
    CHECK(r.failures.front().predicate.find("h^2") != std::string::npos);
}

TEST_CASE("validate_tier input errors") {
    CHECK_THROWS_AS(validate_tier(constant_bound(), 8), BadArgument);
    CHECK_THROWS_AS(validate_tier(constant_bound(), 64, 1.0), BadArgument);
    const GrowthBound bad("nan", [](double r) { return r > 5.0 ? std::nan("") : 1.0; });
    CHECK_THROWS_AS(validate_tier(bad), InvalidFunction);
}

TEST_CASE("appendix tail bounds for the power family") {
    const double alpha = 0.25;
    const GrowthBound h = power_bound(alpha);
    for (int n : {1, 2}) CHECK(compute_H(h, 1.0, n) <= std::pow(2.0, n * alpha) / (1.0 - n * alpha));
}

TEST_CASE("compute_H closed forms and brackets") {
    CHECK(compute_H(constant_bound(), 2.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(compute_H(quarterlog_bound(), 10.0, 2) <= 2.0 * std::sqrt(std::log(2.0 * std::numbers::e + 20.0)) / 10.0);
    const double v = compute_H(power_bound(0.25), 1.0);
    CHECK(v >= 1.0 / 0.75);
    CHECK(v <= std::pow(2.0, 0.25) / 0.75);
    CHECK_THROWS_AS(compute_H(linear_bound(), 1.0), DivergentIntegral);
    CHECK_THROWS_AS(compute_H(power_bound(0.6), 1.0, 2), DivergentIntegral);
}

TEST_CASE("compute_H agrees with a Gauss-Kronrod oracle on 50 log-spaced radii") {
    const GrowthBound bounds[] = {constant_bound(), power_bound(0.25), quarterlog_bound(), power_bound(0.4)};
    for (const GrowthBound& h : bounds)
        for (int p : {1, 2}) {
            double prev = std::numeric_limits<double>::infinity();
            for (int i = 0; i < 50; ++i) {
                const double r = std::pow(10.0, -6.0 + 10.0 * i / 49.0);
                const double got = compute_H(h, r, p);
                const double want = H_oracle(h, r, p);
                CAPTURE(h.label());
                CAPTURE(p);
                CAPTURE(r);
                CHECK(std::abs(got - want) <= 1e-6 * want);
                CHECK(got < prev);
                prev = got;
            }
        }
}

TEST_CASE("E and mu") {
    CHECK(compute_E(constant_bound(), 1.0) == doctest::Approx(4.0).epsilon(1e-9));
    for (const GrowthBound& h : {constant_bound(), power_bound(0.25), quarterlog_bound()}) {
        const Envelope env = select_envelope(h);
        CHECK(env(0.0) == 0.0);
        const EMu small = compute_E_and_mu(h, 1e-6, env);
        CHECK(small.E <= small.mu);
        for (double r : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
            const EMu em = compute_E_and_mu(h, r, env);
            CHECK(em.E <= em.mu);
            CHECK(env(r) <= 0.5 * (env(0.5 * r) + env(1.5 * r)) * (1.0 + 1e-12));
        }
    }
    const Envelope e2 = select_envelope(quarterlog_bound());
    CHECK(e2.shape == EnvelopeShape::LogLinear);
    CHECK(compute_E(quarterlog_bound(), 100.0) <= e2.constant * (1.0 + std::log(std::numbers::e + 100.0)) * 100.0);
}

TEST_CASE("gamma_t and F_t closed forms") {
    CHECK(gamma_t(constant_bound(), 1.0, 2.0, 3.0) == doctest::Approx(5.0).epsilon(1e-10));
    CHECK(gamma_t(linear_bound(), 1.0, 1.0, 0.0) == doctest::Approx(std::numbers::e - 1.0).epsilon(1e-10));
    const double want = std::pow(std::sqrt(2.0) + 0.5, 2) - 1.0;
    CHECK(gamma_t(power_bound(0.5), 1.0, 1.0, 1.0) == doctest::Approx(want).epsilon(1e-10));
    CHECK(gamma_t(power_bound(0.5), 1.0, 0.0, 1.0) == 1.0);

    for (double t : {0.0, 0.5, 3.0})
        for (double r : {0.0, 1.0, 40.0}) CHECK(F_t(constant_bound(2.5), 1.0, t, r) == 2.5);
    CHECK(F_t(linear_bound(), 1.0, 1.0, 0.0) == doctest::Approx(std::numbers::e).epsilon(1e-10));
    const GrowthBound h1 = power_bound(0.25);
    CHECK(F_t(h1, 1.0, 1.0, 10.0) >= h1(10.0));
    CHECK(F_t(h1, 1.0, 2.0, 10.0) >= F_t(h1, 1.0, 1.0, 10.0));
    CHECK(F_t(h1, 1.0, 1.0, 20.0) >= F_t(h1, 1.0, 1.0, 10.0));
}

TEST_CASE("mubar, chi_t and phi_alpha") {
    const double inv_e = std::exp(-1.0);
    CHECK(mubar(inv_e) == doctest::Approx(inv_e));
    CHECK(mubar(0.5) == inv_e);
    CHECK(mubar(0.0) == 0.0);
    for (double r : {0.0, 0.3, 1.0, 7.0}) CHECK(chi_t(2.0, 0.0, r) == r);
    CHECK_THROWS_AS(mubar(-1.0), BadArgument);
    CHECK_THROWS_AS(chi_t(1.0, 1.0, -0.1), BadArgument);
    CHECK_THROWS_AS(phi_alpha(1.0, 1.0, 0.5, -1.0), BadArgument);

    using big = boost::multiprecision::cpp_bin_float_50;
    const big x("0.25");
    const big want = x + pow(x, big(1) / big("1.5"));
    CHECK(phi_alpha(1.0, 0.0, 0.5, 0.25) == doctest::Approx(static_cast<double>(want)).epsilon(1e-15));
    for (double t : {0.1, 1.0, 4.0})
        for (double a : {0.1, 0.5, 0.9})
            for (double xv : {1e-6, 0.01, 0.3, 2.0}) {
                const big e = exp(big(-1.0 * t));
                const big ref = big(xv) + pow(big(xv), e / (big(a) + e));
                CHECK(phi_alpha(1.0, t, a, xv) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
            }
}

TEST_CASE("existence-time estimates") {
    const ExistenceEstimate lin = existence_time_estimate([](double s) { return s; }, 1.0, 1.0);
    CHECK(std::isinf(lin.t_max));
    CHECK(lin.lambda_bound(1.0) == doctest::Approx(std::numbers::e).epsilon(1e-8));
    const ExistenceEstimate ric = existence_time_estimate([](double s) { return s * s; }, 1.0, 1.0);
    CHECK(ric.t_max == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(ric.lambda_bound(0.5) == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(std::isinf(ric.lambda_bound(1.5)));

    const GrowthBound h2 = classify(quarterlog_bound());
    CHECK(std::isinf(existence_time_estimate(h2, 1.0, 1.0, 1.0).t_max));
    const GrowthBound h1 = classify(power_bound(0.25));
    CHECK(std::isfinite(existence_time_estimate(h1, 1.0, 1.0, 1.0).t_max));
    CHECK_THROWS_AS(existence_time_estimate(power_bound(0.25), 1.0, 1.0, 1.0), TierRequired);
    CHECK_THROWS_AS(existence_time_estimate(classify(power_bound(0.6)), 1.0, 1.0, 1.0), TierRequired);
}

TEST_CASE("bound identifiers") {
    CHECK(bound_from_id("const")(5.0) == 1.0);
    CHECK(bound_from_id("const:2")(5.0) == 2.0);
    CHECK(bound_from_id("power:0.5")(3.0) == doctest::Approx(2.0));
    CHECK(bound_from_id("quarterlog")(0.0) == doctest::Approx(1.0));
    CHECK(bound_from_id("linear")(2.0) == 3.0);
    CHECK_THROWS_AS(bound_from_id("power:x"), BadArgument);
    CHECK_THROWS_AS(bound_from_id("exp"), BadArgument);
}
