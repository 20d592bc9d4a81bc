#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "growthflow/errors.hpp"
#include "growthflow/fields.hpp"
#include "growthflow/stability.hpp"

using namespace growthflow;

namespace {

PairSetup shift_setup(double eps, int n = 32, double T = 1.0) {
    PairSetup s;
    s.field1 = make_rankine(1.0, 1.0, n);
    s.field2 = eps == 0.0 ? s.field1 : s.field1.translated({eps, 0.0});
    s.T = T;
    s.dt = 0.02;
    s.probes = sample_grid(1.5, 8);
    return s;
}

void check_eta_below_M(const StabilityReport& r) {
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        CAPTURE(r.times[k]);
        CHECK(r.eta[k] <= r.M[k]);
        if (k > 0) CHECK(r.M[k] >= r.M[k - 1]);
    }
}

}  // namespace

TEST_CASE("identical data gives identically zero distances") {
    const StabilityReport r = run_pair(shift_setup(0.0, 16, 0.4));
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        CHECK(r.eta[k] == 0.0);
        CHECK(r.M[k] == 0.0);
        CHECK(r.Q[k] == 0.0);
        CHECK(r.J_norm[k] == 0.0);
    }
    CHECK(r.aT == 0.0);
    CHECK(r.s_zeta_norm == 0.0);
    CHECK(aT_simple_ratio(r) == 0.0);
    CHECK(q_envelope_check(r).pass);
}

TEST_CASE("small shift: eta <= M and the Q envelope") {
    const StabilityReport r = run_pair(shift_setup(0.01));
    check_eta_below_M(r);
    CHECK(r.h_is_one);
    CHECK(r.aT > 0.0);
    CHECK(r.C0 > 0.0);
    CHECK(r.J_norm.front() <= 1e-14);
    CHECK(r.du0 == r.Q.front());
    CHECK(r.domega0 == doctest::Approx(1.0));
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        CHECK(std::isfinite(r.J1_norm[k]));
        CHECK(r.J1_norm[k] >= 0.0);
    }

    const EnvelopeFit q = q_envelope_check(r);
    CHECK(q.pass);
    CHECK(q.margin >= 0.0);
    CHECK(q_envelope_check_with(r, q.C).pass);

    StabilityReport doubled = r;
    for (double& v : doubled.Q) v *= 2.0;
    CHECK_FALSE(q_envelope_check_with(doubled, q.C).pass);

    const std::span<const StabilityReport> one(&r, 1);
    const EnvelopeFit small = fit_small_data(one);
    CHECK(small.pass);
    CHECK(small.samples > 0);
    CHECK(small_data_holds(r, small.C));
    const double large = fit_large_data(one);
    CHECK(std::isfinite(large));
    CHECK(large > 0.0);
    CHECK(std::isfinite(aT_simple_ratio(r)));
}

TEST_CASE("amplitude perturbation") {
    PairSetup s = shift_setup(0.0, 24, 0.6);
    s.field2 = s.field1.scaled(1.01);
    const StabilityReport r = run_pair(s);
    check_eta_below_M(r);
    CHECK(r.domega0 == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(r.aT > 0.0);
    CHECK(q_envelope_check(r).pass);
}

TEST_CASE("large perturbation still keeps eta below M") {
    const StabilityReport r = run_pair(shift_setup(0.5, 16, 1.0));
    check_eta_below_M(r);
    const std::span<const StabilityReport> one(&r, 1);
    CHECK(std::isfinite(fit_large_data(one)));
}

TEST_CASE("pair hypotheses") {
    CHECK_NOTHROW(check_pair_hypotheses(constant_bound(), constant_bound()));
    CHECK_NOTHROW(check_pair_hypotheses(power_bound(0.25), constant_bound()));
    CHECK_THROWS_AS(check_pair_hypotheses(constant_bound(), power_bound(0.25)), HypothesisViolation);
    CHECK_THROWS_AS(check_pair_hypotheses(linear_bound(), linear_bound()), HypothesisViolation);
    PairSetup s = shift_setup(0.01, 16, 0.2);
    s.h = power_bound(0.25);
    CHECK_THROWS_AS(run_pair(s), HypothesisViolation);
    s = shift_setup(0.01, 16, 0.2);
    s.dt = 0.0;
    CHECK_THROWS_AS(run_pair(s), BadArgument);
}

TEST_CASE("phi_alpha bound preconditions") {
    const StabilityReport r = run_pair(shift_setup(0.01, 16, 0.4));
    const PhiAlphaCheck c = phi_alpha_bound_check(r, 0.5, 0.25, 0.2);
    CHECK(c.phi > 0.0);
    CHECK(c.aT_star <= r.aT);
    CHECK(std::isfinite(c.ratio));
    CHECK(c.t_star_limit <= r.T);
    CHECK_THROWS_AS(phi_alpha_bound_check(r, 0.5, 0.5, 0.2), HypothesisViolation);
    CHECK_THROWS_AS(phi_alpha_bound_check(r, 0.5, 0.6, 0.2), HypothesisViolation);
    CHECK_THROWS_AS(phi_alpha_bound_check(r, 0.5, 0.25, 0.4), HypothesisViolation);
    CHECK_THROWS_AS(phi_alpha_bound_check(r, 0.5, 0.25, 0.2, 1e3), HypothesisViolation);

    StabilityReport other = r;
    other.h_is_one = false;
    CHECK_THROWS_AS(phi_alpha_bound_check(other, 0.5, 0.25, 0.2), HypothesisViolation);
}

TEST_CASE("window chaining") {
    const auto w = chain_windows(1.0, 0.3);
    REQUIRE(w.size() == 4);
    CHECK(w[0] == doctest::Approx(0.25));
    CHECK(w.back() == 1.0);
    CHECK(chain_windows(1.0, 1.0).size() == 1);
    CHECK(chain_windows(1.0, 2.0).size() == 1);
    CHECK_THROWS_AS(chain_windows(0.0, 1.0), BadArgument);
}

TEST_CASE("sup_difference") {
    const auto f = [](Vec2 p) { return p.x; };
    const auto g = [](Vec2 p) { return p.y; };
    const std::vector<Vec2> pts{{2.0, -1.0}};
    CHECK(sup_difference(f, g, pts, 0.5, 1024) == 3.0);
    const double v = sup_difference(f, g, {}, 1.0, 4096);
    CHECK(v <= 2.0);
    CHECK(v > 1.9);
}
