#include "growthflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "growthflow/errors.hpp"
#include "growthflow/parallel.hpp"

namespace growthflow {

ParticleSystem::ParticleSystem(std::vector<Vec2> points, std::size_t active_begin, std::vector<double> omega,
                               std::vector<double> areas)
    : points_(std::move(points)), active_begin_(active_begin), omega_(std::move(omega)), areas_(std::move(areas)) {
    if (omega_.size() != areas_.size()) throw BadArgument("ParticleSystem: omega and areas differ in length");
    if (active_begin_ + omega_.size() > points_.size())
        throw BadArgument("ParticleSystem: active range exceeds the point set");
    for (Vec2 p : points_)
        if (!is_finite(p)) throw BadArgument("ParticleSystem: non-finite initial position");
}

ParticleSystem::ParticleSystem(std::vector<Vec2> points, AnalyticSField u)
    : points_(std::move(points)), analytic_(std::move(u)) {}

SourceCloud ParticleSystem::cloud(std::span<const Vec2> config) const {
    SourceCloud src;
    src.reserve(omega_.size());
    for (std::size_t i = 0; i < omega_.size(); ++i)
        src.push(config[active_begin_ + i], omega_[i] * areas_[i], areas_[i]);
    return src;
}

void ParticleSystem::velocities(std::span<const Vec2> config, std::span<Vec2> out) const {
    if (analytic_) {
        for (std::size_t i = 0; i < config.size(); ++i) out[i] = analytic_->u(config[i]);
        return;
    }
    if (omega_.empty()) {
        std::fill(out.begin(), out.end(), Vec2{});
        return;
    }
    velocity_direct(cloud(config), config, out);
}

std::vector<Vec2> ParticleSystem::velocity_at(std::span<const Vec2> config, std::span<const Vec2> targets) const {
    std::vector<Vec2> out(targets.size());
    if (analytic_) {
        for (std::size_t i = 0; i < targets.size(); ++i) out[i] = analytic_->u(targets[i]);
    } else if (!omega_.empty()) {
        velocity_direct(cloud(config), targets, out);
    }
    return out;
}

void ParticleSystem::step(double dt, const StageObserver& observer) {
    static constexpr double offset[4] = {0.0, 0.5, 0.5, 1.0};
    const std::size_t n = points_.size();
    scratch_.resize(n);
    for (auto& k : k_) k.resize(n);
    for (int s = 0; s < 4; ++s) {
        std::span<const Vec2> config = points_;
        if (s > 0) {
            const double h = offset[s] * dt;
            for (std::size_t i = 0; i < n; ++i) scratch_[i] = points_[i] + h * k_[s - 1][i];
            config = scratch_;
        }
        velocities(config, k_[s]);
        for (const Vec2& v : k_[s])
            if (!is_finite(v)) throw BlowUp("non-finite velocity during RK4 step", time_ + offset[s] * dt);
        if (observer) observer(s, k_[s]);
    }
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i)
        points_[i] += w * (k_[0][i] + 2.0 * k_[1][i] + 2.0 * k_[2][i] + k_[3][i]);
    time_ += dt;
}

// ---------------------------------------------------------------------------

std::size_t FlowTrajectorySet::step_of(double t) const {
    if (times.empty()) throw BadArgument("empty trajectory set");
    const double tol = 1e-9 * std::max(1.0, std::abs(times.back()));
    if (t < times.front() - tol || t > times.back() + tol)
        throw BadArgument("time " + std::to_string(t) + " is outside the recorded run");
    if (times.size() == 1) return 0;
    const std::size_t k = static_cast<std::size_t>(std::llround((t - times.front()) / dt()));
    if (k >= times.size() || std::abs(times[k] - t) > tol)
        throw BadArgument("time " + std::to_string(t) + " is not on the recorded step grid");
    return k;
}

VortexParticleField FlowTrajectorySet::field_at(std::size_t step) const {
    VortexParticleField f;
    f.positions.assign(positions.at(step).begin(), positions.at(step).begin() + static_cast<long>(n_particles));
    f.omega = omega;
    f.areas = areas;
    for (const Vec2 p : f.positions) f.support_radius = std::max(f.support_radius, norm(p));
    return f;
}

std::vector<Vec2> FlowTrajectorySet::particles_at_time(double t) const {
    if (times.empty()) throw BadArgument("empty trajectory set");
    const double tol = 1e-9 * std::max(1.0, std::abs(times.back()));
    if (t < times.front() - tol || t > times.back() + tol)
        throw BadArgument("time " + std::to_string(t) + " is outside the recorded run");
    std::vector<Vec2> out(n_particles);
    if (times.size() == 1) {
        std::copy_n(positions[0].begin(), n_particles, out.begin());
        return out;
    }
    const double u = (t - times.front()) / dt();
    std::size_t k = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(times.size() - 2)));
    const double s = std::clamp(u - static_cast<double>(k), 0.0, 1.0);
    for (std::size_t i = 0; i < n_particles; ++i)
        out[i] = (1.0 - s) * positions[k][i] + s * positions[k + 1][i];
    return out;
}

std::vector<Vec2> FlowTrajectorySet::velocity(std::size_t step, std::span<const Vec2> targets) const {
    std::vector<Vec2> out(targets.size());
    if (analytic) {
        for (std::size_t i = 0; i < targets.size(); ++i) out[i] = analytic->u(targets[i]);
        return out;
    }
    if (n_particles == 0) return out;
    const auto& pos = positions.at(step);
    const SourceCloud src = SourceCloud::from(std::span<const Vec2>(pos.data(), n_particles), omega, areas);
    velocity_direct(src, targets, out);
    return out;
}

Vec2 FlowTrajectorySet::velocity_at_time(double t, Vec2 p) const {
    if (analytic) return analytic->u(p);
    if (n_particles == 0) return {};
    const std::vector<Vec2> pos = particles_at_time(t);
    return growthflow::velocity_at(SourceCloud::from(pos, omega, areas), p);
}

// ---------------------------------------------------------------------------

namespace {

std::size_t step_count(double T, double dt) {
    if (!(dt > 0.0)) throw BadArgument("advect needs dt > 0");
    if (!(T >= 0.0)) throw BadArgument("advect needs T >= 0");
    return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

double max_ratio_over_h(std::span<const Vec2> pos, std::span<const Vec2> vel, const GrowthBound& h) {
    double m = 0.0;
    for (std::size_t i = 0; i < pos.size(); ++i) m = std::max(m, norm(vel[i]) / h(norm(pos[i])));
    return m;
}

FlowTrajectorySet run(ParticleSystem& sys, std::size_t nsteps, double T, const GrowthBound& h,
                      const std::function<double(std::span<const Vec2>)>& omega_max) {
    FlowTrajectorySet out;
    out.h_label = h.label();
    const double dt = nsteps > 0 ? T / static_cast<double>(nsteps) : 0.0;
    out.times.reserve(nsteps + 1);
    out.positions.reserve(nsteps + 1);
    double c0 = 0.0;
    const auto record = [&](std::size_t k) {
        out.times.push_back(dt * static_cast<double>(k));
        out.positions.emplace_back(sys.positions().begin(), sys.positions().end());
    };
    record(0);
    for (std::size_t k = 0; k < nsteps; ++k) {
        const std::vector<Vec2> start(sys.positions().begin(), sys.positions().end());
        sys.step(dt, [&](int stage, std::span<const Vec2> v) {
            if (stage == 0) c0 = std::max(c0, max_ratio_over_h(start, v, h) + omega_max(start));
        });
        record(k + 1);
    }
    std::vector<Vec2> v(sys.positions().size());
    sys.velocities(sys.positions(), v);
    c0 = std::max(c0, max_ratio_over_h(sys.positions(), v, h) + omega_max(sys.positions()));
    out.C0 = c0;
    return out;
}

}  // namespace

FlowTrajectorySet advect(const VortexParticleField& field, std::span<const Vec2> tracers, double T, double dt,
                         const GrowthBound& h) {
    field.validate();
    const std::size_t nsteps = step_count(T, dt);
    std::vector<Vec2> points = field.positions;
    points.insert(points.end(), tracers.begin(), tracers.end());
    ParticleSystem sys(std::move(points), 0, field.omega, field.areas);
    const double wmax = field.max_abs_omega();
    FlowTrajectorySet out = run(sys, nsteps, T, h, [wmax](std::span<const Vec2>) { return wmax; });
    out.n_particles = field.size();
    out.omega = field.omega;
    out.areas = field.areas;
    return out;
}

FlowTrajectorySet advect(const AnalyticSField& u, std::span<const Vec2> tracked, double T, double dt,
                         const GrowthBound& h) {
    const std::size_t nsteps = step_count(T, dt);
    ParticleSystem sys(std::vector<Vec2>(tracked.begin(), tracked.end()), u);
    FlowTrajectorySet out = run(sys, nsteps, T, h, [&u](std::span<const Vec2> pos) {
        double m = 0.0;
        for (const Vec2 p : pos) m = std::max(m, std::abs(u.omega(p)));
        return m;
    });
    out.analytic = u;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> pick_steps(std::size_t steps, std::size_t max_times) {
    std::vector<std::size_t> ks;
    if (steps < 2 || max_times == 0) return ks;
    const std::size_t last = steps - 1;
    const std::size_t m = std::min(max_times, last);
    for (std::size_t j = 1; j <= m; ++j) ks.push_back((last * j) / m);
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

FlowBoundCheck bound_check(const FlowTrajectorySet& a, const FlowTrajectorySet* b, double c_ref,
                           double c_gamma, const GrowthBound& h, std::size_t max_times, std::size_t max_tracks) {
    FlowBoundCheck out;
    out.C0 = c_ref;
    const std::size_t n = a.tracks();
    const std::size_t stride = std::max<std::size_t>(1, (n + max_tracks - 1) / std::max<std::size_t>(max_tracks, 1));
    for (const std::size_t k : pick_steps(a.steps(), max_times)) {
        const double t = a.times[k];
        double worst = 0.0;
        for (std::size_t i = 0; i < n; i += stride) {
            const Vec2 x0 = a.positions[0][i];
            const Vec2 other = b ? b->positions[k][i] : x0;
            const double F = c_gamma > 0.0 ? F_t(h, c_gamma, t, norm(x0)) : h(norm(x0));
            worst = std::max(worst, norm(a.positions[k][i] - other) / (F * t));
        }
        out.times.push_back(t);
        out.ratios.push_back(worst);
        out.max_ratio = std::max(out.max_ratio, worst);
    }
    out.pass = out.max_ratio <= 1.05 * c_ref;
    return out;
}

}  // namespace

FlowBoundCheck flow_bound_check(const FlowTrajectorySet& traj, const GrowthBound& h, std::size_t max_times,
                                std::size_t max_tracks) {
    return bound_check(traj, nullptr, traj.C0, traj.C0, h, max_times, max_tracks);
}

FlowBoundCheck flow_pair_bound_check(const FlowTrajectorySet& a, const FlowTrajectorySet& b,
                                     const GrowthBound& h, std::size_t max_times, std::size_t max_tracks) {
    if (a.steps() != b.steps() || a.tracks() != b.tracks())
        throw BadArgument("flow_pair_bound_check needs runs on the same grid and tracks");
    return bound_check(a, &b, a.C0 + b.C0, std::max(a.C0, b.C0), h, max_times, max_tracks);
}

MocCheck moc_check(const FlowTrajectorySet& traj, double C0, std::size_t first_track, std::size_t count,
                   std::size_t max_times) {
    if (first_track + count > traj.tracks()) throw BadArgument("moc_check track range exceeds the run");
    MocCheck out;
    std::vector<std::size_t> ks{0};
    for (const std::size_t k : pick_steps(traj.steps(), max_times)) ks.push_back(k);
    for (const std::size_t k : ks) {
        const double t = traj.times[k];
        double worst = 0.0;
        for (std::size_t i = first_track; i < first_track + count; ++i)
            for (std::size_t j = i + 1; j < first_track + count; ++j) {
                const double d0 = norm(traj.positions[0][i] - traj.positions[0][j]);
                if (d0 == 0.0) continue;
                const double dt = norm(traj.positions[k][i] - traj.positions[k][j]);
                worst = std::max(worst, dt / chi_t(C0, t, d0));
            }
        out.times.push_back(t);
        out.ratios.push_back(worst);
        out.constant = std::max(out.constant, worst);
    }
    return out;
}

namespace {

Vec2 integrate_history(const FlowTrajectorySet& traj, double t0, double t1, Vec2 p) {
    if (t1 == t0) return p;
    const double dt = traj.dt() > 0.0 ? traj.dt() : std::abs(t1 - t0);
    const std::size_t n = static_cast<std::size_t>(std::ceil(std::abs(t1 - t0) / dt - 1e-9));
    const double h = (t1 - t0) / static_cast<double>(n);
    double t = t0;
    for (std::size_t m = 0; m < n; ++m) {
        const Vec2 k1 = traj.velocity_at_time(t, p);
        const Vec2 k2 = traj.velocity_at_time(t + 0.5 * h, p + 0.5 * h * k1);
        const Vec2 k3 = traj.velocity_at_time(t + 0.5 * h, p + 0.5 * h * k2);
        const Vec2 k4 = traj.velocity_at_time(t + h, p + h * k3);
        p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = t0 + static_cast<double>(m + 1) * h;
    }
    return p;
}

void check_time(const FlowTrajectorySet& traj, double t) {
    if (traj.times.empty()) throw BadArgument("empty trajectory set");
    const double tol = 1e-9 * std::max(1.0, traj.times.back());
    if (t < -tol || t > traj.times.back() + tol) throw BadArgument("time outside the recorded run");
}

}  // namespace

Vec2 inverse_flow(const FlowTrajectorySet& traj, double t, Vec2 y) {
    check_time(traj, t);
    return integrate_history(traj, t, 0.0, y);
}

Vec2 forward_flow(const FlowTrajectorySet& traj, double t, Vec2 x) {
    check_time(traj, t);
    return integrate_history(traj, 0.0, t, x);
}

RotationEstimate rotation_rate(const FlowTrajectorySet& traj) {
    RotationEstimate out;
    const std::size_t n = traj.n_particles;
    if (n == 0) throw EmptyField("rotation_rate needs vortex particles");
    for (std::size_t k = 0; k < traj.steps(); ++k) {
        const auto& pos = traj.positions[k];
        double w = 0.0;
        Vec2 c;
        for (std::size_t i = 0; i < n; ++i) {
            const double wi = std::abs(traj.omega[i]) * traj.areas[i];
            w += wi;
            c += wi * pos[i];
        }
        c = c / w;
        double ixx = 0.0, iyy = 0.0, ixy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double wi = std::abs(traj.omega[i]) * traj.areas[i];
            const Vec2 d = pos[i] - c;
            ixx += wi * d.x * d.x;
            iyy += wi * d.y * d.y;
            ixy += wi * d.x * d.y;
        }
        double th = 0.5 * std::atan2(2.0 * ixy, ixx - iyy);
        if (!out.angles.empty()) {
            const double prev = out.angles.back();
            th += std::numbers::pi * std::round((prev - th) / std::numbers::pi);
        }
        out.times.push_back(traj.times[k]);
        out.angles.push_back(th);
    }
    const double m = static_cast<double>(out.times.size());
    double st = 0.0, sa = 0.0, stt = 0.0, sta = 0.0;
    for (std::size_t k = 0; k < out.times.size(); ++k) {
        st += out.times[k];
        sa += out.angles[k];
        stt += out.times[k] * out.times[k];
        sta += out.times[k] * out.angles[k];
    }
    const double den = m * stt - st * st;
    out.rate = den > 0.0 ? (m * sta - st * sa) / den : 0.0;
    return out;
}

double velocity_drift(const FlowTrajectorySet& traj, std::span<const Vec2> probes) {
    const std::vector<Vec2> u0 = traj.velocity(0, probes);
    double worst = 0.0;
    for (std::size_t k = 1; k < traj.steps(); ++k) {
        const std::vector<Vec2> u = traj.velocity(k, probes);
        for (std::size_t i = 0; i < probes.size(); ++i) worst = std::max(worst, norm(u[i] - u0[i]));
    }
    return worst;
}

double hull_area(const FlowTrajectorySet& traj, std::size_t step, std::size_t first_track, std::size_t count) {
    std::vector<Vec2> p(traj.positions.at(step).begin() + static_cast<long>(first_track),
                        traj.positions.at(step).begin() + static_cast<long>(first_track + count));
    if (p.size() < 3) return 0.0;
    std::sort(p.begin(), p.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    const auto cross = [](Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
    std::vector<Vec2> hull(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p[i]) <= 0.0) --k;
        hull[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], p[i]) <= 0.0) --k;
        hull[k++] = p[i];
    }
    hull.resize(k - 1);
    double area = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec2 a = hull[i];
        const Vec2 b = hull[(i + 1) % hull.size()];
        area += a.x * b.y - a.y * b.x;
    }
    return 0.5 * std::abs(area);
}

}  // namespace growthflow
