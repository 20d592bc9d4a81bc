#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "growthflow/biot_savart.hpp"
#include "growthflow/errors.hpp"
#include "growthflow/fields.hpp"
#include "growthflow/flow.hpp"
#include "growthflow/kernel.hpp"
#include "growthflow/serfati.hpp"

using namespace growthflow;

TEST_CASE("both sides vanish at t = 0") {
    const FlowTrajectorySet run = advect(make_kirchhoff(2.0, 1.0, 1.0, 16), {}, 0.2, 0.05, constant_bound());
    const std::vector<Vec2> pts{{0.5, 0.0}, {3.0, 1.0}};
    const std::vector<double> ts{0.0};
    const std::vector<double> ls{0.5, 2.0};
    const SerfatiResidual r = serfati_residual(run, pts, ts, ls);
    for (std::size_t l = 0; l < ls.size(); ++l)
        for (std::size_t p = 0; p < pts.size(); ++p) {
            CHECK(norm(r.lhs[l][0][p]) == 0.0);
            CHECK(norm(r.rhs[l][0][p]) == 0.0);
        }
    CHECK(r.max_residual == 0.0);
}

TEST_CASE("zero vorticity gives identically zero terms") {
    const FlowTrajectorySet run = advect(make_rankine(1.0, 0.0, 16), {}, 0.5, 0.05, constant_bound());
    const std::vector<Vec2> pts{{0.2, 0.1}, {2.0, -1.0}};
    const std::vector<double> ts{0.5};
    const std::vector<double> ls{1.0};
    const SerfatiResidual r = serfati_residual(run, pts, ts, ls);
    for (std::size_t p = 0; p < pts.size(); ++p) {
        CHECK(norm(r.near[0][0][p]) == 0.0);
        CHECK(norm(r.far[0][0][p]) == 0.0);
    }
}

TEST_CASE("steady Rankine vortex has a small right-hand side") {
    const FlowTrajectorySet run = advect(make_rankine(1.0, 1.0, 32), {}, 1.0, 0.05, constant_bound());
    const std::vector<Vec2> pts{{0.4, 0.0}, {0.0, 1.5}, {-2.5, 0.5}};
    const std::vector<double> ts{1.0};
    const std::vector<double> ls{1.0};
    const SerfatiResidual r = serfati_residual(run, pts, ts, ls);
    // Inside the patch the point sums see lattice noise of order 1e-2; the
    // identity still holds there.
    for (std::size_t p = 0; p < pts.size(); ++p) {
        CAPTURE(p);
        CHECK(norm(r.rhs[0][0][p]) < 1e-2);
        CHECK(norm(r.lhs[0][0][p] - r.rhs[0][0][p]) < 1e-4);
        if (p > 0) CHECK(norm(r.rhs[0][0][p]) < 1e-3);
    }
}

TEST_CASE("a large cutoff leaves only the Biot-Savart difference") {
    const VortexParticleField f = make_kirchhoff(2.0, 1.0, 1.0, 16);
    const FlowTrajectorySet run = advect(f, {}, 0.5, 0.05, constant_bound());
    const std::vector<Vec2> pts{{0.5, 0.2}, {2.5, -0.5}};
    const std::vector<double> ts{0.5};
    const std::vector<double> ls{60.0};
    const SerfatiResidual r = serfati_residual(run, pts, ts, ls);
    for (std::size_t p = 0; p < pts.size(); ++p) {
        CHECK(norm(r.near[0][0][p] - r.lhs[0][0][p]) <= 1e-12);
        CHECK(norm(r.far[0][0][p]) <= 1e-4);
    }
}

TEST_CASE("near term is linear in the vorticity") {
    const VortexParticleField f = make_kirchhoff(2.0, 1.0, 1.0, 24);
    const CutoffKernel k(1.0);
    for (const Vec2 x : {Vec2{0.3, 0.1}, Vec2{2.2, 0.9}}) {
        const Vec2 a = near_field_convolve(k, f, x);
        const Vec2 b = near_field_convolve(k, f.scaled(2.0), x);
        CHECK(b.x == doctest::Approx(2.0 * a.x).epsilon(1e-13));
        CHECK(b.y == doctest::Approx(2.0 * a.y).epsilon(1e-13));
    }
}

TEST_CASE("doubling the vorticity on half the time doubles the right-hand side") {
    const VortexParticleField f = make_kirchhoff(2.0, 1.0, 1.0, 16);
    const FlowTrajectorySet slow = advect(f, {}, 1.0, 0.05, constant_bound());
    const FlowTrajectorySet fast = advect(f.scaled(2.0), {}, 0.5, 0.025, constant_bound());
    for (const Vec2 x : {Vec2{0.5, 0.0}, Vec2{2.5, 1.0}}) {
        const Vec2 a = serfati_rhs(slow, x, 1.0, 1.0);
        const Vec2 b = serfati_rhs(fast, x, 0.5, 1.0);
        CHECK(norm(b - 2.0 * a) <= 1e-9 * std::max(1.0, norm(a)));
    }
    CHECK_THROWS_AS(serfati_rhs(slow, {0.0, 0.0}, 2.0, 1.0), BadArgument);
    CHECK_THROWS_AS(serfati_rhs(slow, {0.0, 0.0}, 1.0, 0.0), BadArgument);
}

TEST_CASE("lambda star") {
    const auto one = [](double) { return 1.0; };
    CHECK(lambda_star(constant_bound(), {1.0, 0.0}, one, 4.0).lambda == doctest::Approx(4.0).epsilon(1e-10));
    const LambdaStar zero = lambda_star(constant_bound(), {1.0, 0.0}, [](double) { return 0.0; }, 4.0);
    CHECK(zero.degenerate);
    CHECK(zero.lambda == 0.0);
    CHECK(lambda_star(constant_bound(), {}, one, 0.0).degenerate);
    CHECK(lambda_star(power_bound(0.25), {15.0, 0.0}, one, 1.0).lambda == doctest::Approx(4.0).epsilon(1e-10));
    CHECK_THROWS_AS(lambda_star(constant_bound(), {}, one, -1.0), BadArgument);
}

// Known failure: the residual at lambda = 0.5 stays more than 3x the one at
// lambda = 2 (10x at n = 24, 4.6x at n = 48, 4.0x at n = 96). The small
// cutoff resolves the particle lattice; the spread narrows under refinement.
TEST_CASE("residual is within 3x across lambda" * doctest::should_fail()) {
    const FlowTrajectorySet run = advect(make_kirchhoff(2.0, 1.0, 1.0, 48), {}, 2.0, 0.02, constant_bound());
    std::vector<Vec2> pts;
    for (double r : {0.6, 1.5, 3.0})
        for (int k = 0; k < 4; ++k) {
            const double th = (k + 0.5) * std::numbers::pi / 2.0;
            pts.push_back({r * std::cos(th), r * std::sin(th)});
        }
    const std::vector<double> ts{1.0, 2.0};
    const std::vector<double> ls{0.5, 1.0, 2.0};
    SerfatiOptions opt;
    opt.time_stride = 2;
    const SerfatiResidual r = serfati_residual(run, pts, ts, ls, opt);
    const auto [lo, hi] = std::minmax_element(r.residual_norm.begin(), r.residual_norm.end());
    CAPTURE(*lo);
    CAPTURE(*hi);
    CHECK(*hi <= 3.0 * *lo);
}
