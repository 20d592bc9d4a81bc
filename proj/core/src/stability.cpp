#include "growthflow/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "growthflow/biot_savart.hpp"
#include "growthflow/errors.hpp"
#include "growthflow/flow.hpp"
#include "growthflow/kernel.hpp"
#include "growthflow/parallel.hpp"

namespace growthflow {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::vector<double> hypothesis_grid() {
    std::vector<double> r{0.0};
    for (int i = 0; i <= 240; ++i) r.push_back(std::pow(10.0, -6.0 + 10.0 * i / 240.0));
    return r;
}

double weighted_gap(std::span<const Vec2> a, std::span<const Vec2> b, std::span<const double> inv_zeta) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, norm(a[i] - b[i]) * inv_zeta[i]);
    return m;
}

// (a_lambda K) * (w1 at p1 - w2 at p2) evaluated at y, with lambda fixed by the caller.
Vec2 cutoff_difference(const SourceCloud& c1, const SourceCloud& c2, const CutoffKernel& k, Vec2 y) {
    const Vec2 s1 = cutoff_velocity_at(c1, k, y);
    const Vec2 s2 = cutoff_velocity_at(c2, k, y);
    return s1 - s2;
}

double radical_inverse(std::size_t i, std::size_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double v = 0.0;
    while (i > 0) {
        v += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return v;
}

}  // namespace

std::vector<double> StabilityReport::aT_series() const {
    std::vector<double> out(J_norm.size());
    double run = 0.0;
    for (std::size_t k = 0; k < J_norm.size(); ++k) {
        run = std::max(run, J_norm[k]);
        out[k] = du0 + run;
    }
    return out;
}

void check_pair_hypotheses(const GrowthBound& zeta, const GrowthBound& h) {
    for (double r : hypothesis_grid())
        if (zeta(r) < h(r) * (1.0 - 1e-12))
            throw HypothesisViolation("zeta >= h fails at r = " + std::to_string(r));
    if (validate_tier(h, 256, 1e4, Tier::WellPosedness).tier < Tier::WellPosedness)
        throw HypothesisViolation("h is not a well-posedness growth bound");
    if (validate_tier(quotient_bound(zeta, h), 256, 1e4, Tier::Growth).tier < Tier::Growth)
        throw HypothesisViolation("zeta/h is not a growth bound");
    if (validate_tier(product_bound(zeta, h), 256, 1e4, Tier::Growth).tier < Tier::Growth)
        throw HypothesisViolation("zeta*h is not a growth bound");
}

StabilityReport run_pair(const PairSetup& s) {
    if (!(s.T > 0.0) || !(s.dt > 0.0)) throw BadArgument("run_pair needs T > 0 and dt > 0");
    if (s.field1.empty() || s.field2.empty()) throw EmptyField("run_pair needs two nonempty fields");
    s.field1.validate();
    s.field2.validate();
    check_pair_hypotheses(s.zeta, s.h);

    const std::size_t n1 = s.field1.size();
    const std::size_t n2 = s.field2.size();
    const double support = std::max({s.field1.support_radius, s.field2.support_radius, 1e-3});

    std::vector<Vec2> probes = s.probes;
    const double ring_r = s.ring_factor * support;
    for (int k = 0; k < s.ring_points; ++k) {
        const double th = 2.0 * std::numbers::pi * (k + 0.5) / s.ring_points;
        probes.push_back({ring_r * std::cos(th), ring_r * std::sin(th)});
    }
    const std::size_t np = probes.size();

    std::vector<Vec2> tracked;
    tracked.reserve(n1 + n2 + np);
    tracked.insert(tracked.end(), s.field1.positions.begin(), s.field1.positions.end());
    tracked.insert(tracked.end(), s.field2.positions.begin(), s.field2.positions.end());
    tracked.insert(tracked.end(), probes.begin(), probes.end());
    const std::size_t nt = tracked.size();
    const std::size_t probe0 = n1 + n2;

    std::vector<double> inv_zeta(nt);
    for (std::size_t i = 0; i < nt; ++i) inv_zeta[i] = 1.0 / s.zeta(norm(tracked[i]));
    std::vector<double> probe_lambda(np);
    for (std::size_t p = 0; p < np; ++p) probe_lambda[p] = s.h(norm(probes[p]));

    ParticleSystem sys1(tracked, 0, s.field1.omega, s.field1.areas);
    ParticleSystem sys2(tracked, n1, s.field2.omega, s.field2.areas);

    // Initial vorticity difference as two clouds, kept separate so identical
    // data cancel exactly.
    const SourceCloud init1 = SourceCloud::from(s.field1);
    const SourceCloud init2 = SourceCloud::from(s.field2);

    StabilityReport rep;
    rep.T = s.T;
    rep.zeta_label = s.zeta.label();
    rep.h_label = s.h.label();
    rep.h_is_one = true;
    for (double r : hypothesis_grid())
        if (s.h(r) != 1.0) rep.h_is_one = false;

    const double max_omega = std::max(s.field1.max_abs_omega(), s.field2.max_abs_omega());
    auto s_h_sample = [&](std::span<const Vec2> config, std::span<const Vec2> vel) {
        double m = 0.0;
        for (std::size_t i = 0; i < config.size(); ++i) m = std::max(m, norm(vel[i]) / s.h(norm(config[i])));
        return m + max_omega;
    };

    auto observe_eulerian = [&] {
        const auto pos1 = sys1.positions();
        const auto pos2 = sys2.positions();
        const std::vector<Vec2> u1 = sys1.velocity_at(pos1, probes);
        const std::vector<Vec2> u2 = sys2.velocity_at(pos2, probes);
        rep.Q.push_back(weighted_gap(u1, u2, std::span<const double>(inv_zeta).subspan(probe0)));

        const SourceCloud now1 = SourceCloud::from(pos1.subspan(0, n1), s.field1.omega, s.field1.areas);
        const SourceCloud now2 = SourceCloud::from(pos1.subspan(n1, n2), s.field2.omega, s.field2.areas);
        std::vector<double> j(np), j1(np);
        parallel_for(
            np,
            [&](std::size_t b, std::size_t e) {
                for (std::size_t p = b; p < e; ++p) {
                    const CutoffKernel k(probe_lambda[p]);
                    const Vec2 J2 = cutoff_difference(now1, now2, k, probes[p]);
                    const Vec2 J1 = cutoff_difference(init1, init2, k, pos1[probe0 + p]);
                    j[p] = norm(J2 - J1) * inv_zeta[probe0 + p];
                    j1[p] = norm(J1) * inv_zeta[probe0 + p];
                }
            },
            4);
        rep.J_norm.push_back(np ? *std::max_element(j.begin(), j.end()) : 0.0);
        rep.J1_norm.push_back(np ? *std::max_element(j1.begin(), j1.end()) : 0.0);
    };

    const auto nsteps = static_cast<std::size_t>(std::ceil(s.T / s.dt - 1e-9));
    std::vector<Vec2> k1[4], k2[4];
    double M = 0.0;
    double eta = 0.0;
    double C0 = 0.0;

    rep.times.push_back(0.0);
    rep.eta.push_back(0.0);
    rep.M.push_back(0.0);
    observe_eulerian();
    rep.du0 = rep.Q.front();

    for (std::size_t n = 0; n < nsteps; ++n) {
        const double dt = std::min(s.dt, s.T - static_cast<double>(n) * s.dt);
        const std::vector<Vec2> before1(sys1.positions().begin(), sys1.positions().end());
        const std::vector<Vec2> before2(sys2.positions().begin(), sys2.positions().end());
        sys1.step(dt, [&](int st, std::span<const Vec2> v) { k1[st].assign(v.begin(), v.end()); });
        sys2.step(dt, [&](int st, std::span<const Vec2> v) { k2[st].assign(v.begin(), v.end()); });
        double Ls[4];
        for (int st = 0; st < 4; ++st) Ls[st] = weighted_gap(k1[st], k2[st], inv_zeta);
        rep.L.push_back(Ls[0]);
        C0 = std::max({C0, s_h_sample(before1, k1[0]), s_h_sample(before2, k2[0])});

        const double incr = dt / 6.0 * (Ls[0] + 2.0 * Ls[1] + 2.0 * Ls[2] + Ls[3]);
        if (incr > 0.0 || eta > 0.0) {
            // Rounding of the two position updates, so eta <= M also holds in floating point.
            double slack = 0.0;
            const auto p1 = sys1.positions();
            const auto p2 = sys2.positions();
            for (std::size_t i = 0; i < nt; ++i)
                slack = std::max(slack, (norm(p1[i]) + norm(p2[i]) + norm(before1[i]) + norm(before2[i])) *
                                            inv_zeta[i]);
            M = (M + incr + 8.0 * kEps * slack) * (1.0 + 4.0 * kEps);
        }
        eta = weighted_gap(sys1.positions(), sys2.positions(), inv_zeta);
        rep.times.push_back(sys1.time());
        rep.eta.push_back(eta);
        rep.M.push_back(M);
        observe_eulerian();
    }

    std::vector<Vec2> v1(nt), v2(nt);
    sys1.velocities(sys1.positions(), v1);
    sys2.velocities(sys2.positions(), v2);
    rep.L.push_back(weighted_gap(v1, v2, inv_zeta));
    rep.C0 = std::max({C0, s_h_sample(sys1.positions(), v1), s_h_sample(sys2.positions(), v2)});

    rep.aT = rep.du0 + *std::max_element(rep.J_norm.begin(), rep.J_norm.end());
    if (s.field1.profile && s.field2.profile) {
        std::vector<Vec2> pts(s.field1.positions);
        pts.insert(pts.end(), s.field2.positions.begin(), s.field2.positions.end());
        const double extent = 1.25 * (support + std::max(norm(s.field1.centroid()), norm(s.field2.centroid())));
        rep.domega0 = sup_difference(s.field1.profile, s.field2.profile, pts, extent);
    } else {
        double d = 0.0;
        for (std::size_t i = 0; i < std::min(n1, n2); ++i)
            d = std::max(d, std::abs(s.field1.omega[i] - s.field2.omega[i]));
        rep.domega0 = d;
    }
    rep.s_zeta_norm = rep.du0 + rep.domega0;
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct SmallDataSample {
    double t, x, M;
};

std::vector<SmallDataSample> small_data_samples(const StabilityReport& r) {
    std::vector<SmallDataSample> out;
    const double cap = std::exp(-1.0);
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        const double x = r.times[k] * r.aT;
        if (r.times[k] > 0.0 && x > 0.0 && x < 1.0 && r.M[k] < cap) out.push_back({r.times[k], x, r.M[k]});
    }
    return out;
}

double q_envelope(const StabilityReport& r, std::size_t k, double C) {
    return (r.aT + C * mubar(C * r.M[k])) * std::exp(C * r.times[k]);
}

}  // namespace

bool small_data_holds(const StabilityReport& r, double C) {
    for (const auto& s : small_data_samples(r))
        if (s.M > std::pow(s.x, std::exp(-C * s.t))) return false;
    return true;
}

EnvelopeFit fit_small_data(std::span<const StabilityReport> reports, double C_max) {
    EnvelopeFit fit;
    fit.margin = std::numeric_limits<double>::infinity();
    for (const auto& r : reports)
        for (const auto& s : small_data_samples(r)) {
            ++fit.samples;
            if (s.M <= 0.0) continue;
            const double rho = std::log(s.M) / std::log(s.x);
            if (rho < 1.0) fit.C = std::max(fit.C, -std::log(rho) / s.t);
        }
    fit.pass = fit.C <= C_max;
    for (const auto& r : reports)
        for (const auto& s : small_data_samples(r))
            fit.margin = std::min(fit.margin, std::pow(s.x, std::exp(-fit.C * s.t)) - s.M);
    if (fit.samples == 0) fit.margin = 0.0;
    return fit;
}

EnvelopeFit q_envelope_check_with(const StabilityReport& r, double C) {
    EnvelopeFit fit;
    fit.C = C;
    fit.margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        fit.margin = std::min(fit.margin, q_envelope(r, k, C) - r.Q[k]);
        ++fit.samples;
    }
    fit.pass = fit.margin >= 0.0;
    return fit;
}

EnvelopeFit q_envelope_check(std::span<const StabilityReport> reports, double C_max) {
    auto holds = [&](double C) {
        for (const auto& r : reports)
            if (!q_envelope_check_with(r, C).pass) return false;
        return true;
    };
    double C = 0.0;
    if (!holds(0.0)) {
        double lo = 0.0;
        double hi = 1e-3;
        while (!holds(hi) && hi < C_max) {
            lo = hi;
            hi *= 2.0;
        }
        if (!holds(hi)) {
            EnvelopeFit bad;
            bad.C = C_max;
            bad.pass = false;
            bad.margin = -std::numeric_limits<double>::infinity();
            for (const auto& r : reports) bad.margin = std::max(bad.margin, q_envelope_check_with(r, C_max).margin);
            return bad;
        }
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (holds(mid) ? hi : lo) = mid;
        }
        C = hi;
    }
    EnvelopeFit fit;
    fit.C = C;
    fit.pass = true;
    fit.margin = std::numeric_limits<double>::infinity();
    for (const auto& r : reports) {
        const EnvelopeFit one = q_envelope_check_with(r, C);
        fit.margin = std::min(fit.margin, one.margin);
        fit.samples += one.samples;
    }
    return fit;
}

EnvelopeFit q_envelope_check(const StabilityReport& r, double C_max) {
    return q_envelope_check(std::span<const StabilityReport>(&r, 1), C_max);
}

double fit_large_data(std::span<const StabilityReport> reports) {
    double C = 0.0;
    for (const auto& r : reports)
        for (std::size_t k = 0; k < r.times.size(); ++k) {
            const double x = r.times[k] * r.aT;
            if (x > 0.0) C = std::max(C, r.M[k] / x);
        }
    return C;
}

double aT_simple_ratio(const StabilityReport& r) {
    if (r.s_zeta_norm == 0.0) return r.aT == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return r.aT / r.s_zeta_norm;
}

PhiAlphaCheck phi_alpha_bound_check(const StabilityReport& r, double alpha, double delta, double T_star,
                                    double C) {
    if (!r.h_is_one) throw HypothesisViolation("phi_alpha_bound_check needs h == 1");
    if (!(0.0 < delta && delta < alpha && alpha < 1.0))
        throw HypothesisViolation("phi_alpha_bound_check needs 0 < delta < alpha < 1");
    if (!(C > 0.0)) throw BadArgument("phi_alpha_bound_check needs C > 0");
    PhiAlphaCheck out;
    out.t_star_limit = std::min(r.T, (1.0 + delta) / (C * r.C0));
    if (!(T_star > 0.0 && T_star < out.t_star_limit))
        throw HypothesisViolation("T* = " + std::to_string(T_star) + " violates T* < " +
                                  std::to_string(out.t_star_limit));
    double jmax = 0.0;
    for (std::size_t k = 0; k < r.times.size() && r.times[k] <= T_star * (1.0 + 1e-12); ++k)
        jmax = std::max(jmax, r.J_norm[k]);
    out.aT_star = r.du0 + jmax;
    out.phi = phi_alpha(r.C0, r.T, alpha, C * std::pow(r.du0, delta));
    out.ratio = out.phi > 0.0 ? out.aT_star / out.phi
                              : (out.aT_star == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    return out;
}

std::vector<double> chain_windows(double T, double T_star_max) {
    if (!(T > 0.0) || !(T_star_max > 0.0)) throw BadArgument("chain_windows needs T > 0 and T* > 0");
    const auto N = static_cast<std::size_t>(std::ceil(T / T_star_max - 1e-12));
    std::vector<double> ends(N);
    for (std::size_t k = 0; k < N; ++k) ends[k] = T * static_cast<double>(k + 1) / static_cast<double>(N);
    ends.back() = T;
    return ends;
}

double sup_difference(const std::function<double(Vec2)>& f, const std::function<double(Vec2)>& g,
                      std::span<const Vec2> points, double extent, std::size_t count) {
    double m = 0.0;
    for (const Vec2 p : points) m = std::max(m, std::abs(f(p) - g(p)));
    for (std::size_t i = 1; i <= count; ++i) {
        const Vec2 p{extent * (2.0 * radical_inverse(i, 2) - 1.0), extent * (2.0 * radical_inverse(i, 3) - 1.0)};
        m = std::max(m, std::abs(f(p) - g(p)));
    }
    return m;
}

}  // namespace growthflow
