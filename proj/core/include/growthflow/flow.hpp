#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "growthflow/biot_savart.hpp"
#include "growthflow/fields.hpp"
#include "growthflow/growth_bounds.hpp"
#include "growthflow/vec2.hpp"

namespace growthflow {

/// Points advected by RK4. The range [active_begin, active_end) carries
/// vorticity and generates the velocity; every other point is a passive
/// tracer. Without active points an analytic velocity must be supplied.
class ParticleSystem {
  public:
    using StageObserver = std::function<void(int stage, std::span<const Vec2> velocities)>;

    ParticleSystem(std::vector<Vec2> points, std::size_t active_begin, std::vector<double> omega,
                   std::vector<double> areas);
    ParticleSystem(std::vector<Vec2> points, AnalyticSField u);

    std::span<const Vec2> positions() const { return points_; }
    std::size_t active_begin() const { return active_begin_; }
    std::size_t active_count() const { return omega_.size(); }
    double time() const { return time_; }

    /// Velocity at every point for the given configuration of all points.
    void velocities(std::span<const Vec2> config, std::span<Vec2> out) const;
    /// Velocity at arbitrary targets with the active points at `config`.
    std::vector<Vec2> velocity_at(std::span<const Vec2> config, std::span<const Vec2> targets) const;

    /// One classical RK4 step. The observer sees the four stage velocities.
    /// Throws BlowUp on a non-finite velocity.
    void step(double dt, const StageObserver& observer = {});

  private:
    SourceCloud cloud(std::span<const Vec2> config) const;

    std::vector<Vec2> points_;
    std::size_t active_begin_ = 0;
    std::vector<double> omega_;
    std::vector<double> areas_;
    std::optional<AnalyticSField> analytic_;
    double time_ = 0.0;
    std::vector<Vec2> k_[4];
    std::vector<Vec2> scratch_;
};

/// Recorded trajectories of every tracked point on a uniform time grid.
/// Tracks [0, n_particles) are the vortex particles, the rest are tracers.
struct FlowTrajectorySet {
    std::vector<double> times;
    std::vector<std::vector<Vec2>> positions;  ///< [step][track]
    std::size_t n_particles = 0;
    std::vector<double> omega;  ///< carried vorticity of the particles
    std::vector<double> areas;
    std::optional<AnalyticSField> analytic;
    /// sup over recorded steps of max|u|/h + max|omega| at the tracked points.
    double C0 = 0.0;
    std::string h_label;

    std::size_t steps() const { return times.size(); }
    std::size_t tracks() const { return positions.empty() ? 0 : positions.front().size(); }
    double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }

    /// Index of the stored step at time t. Throws BadArgument if t is
    /// outside the run or not on the grid.
    std::size_t step_of(double t) const;

    VortexParticleField field_at(std::size_t step) const;
    /// Particle positions at any time in the run, linear in t between steps.
    std::vector<Vec2> particles_at_time(double t) const;
    /// Velocity at targets for the particle configuration of a stored step.
    std::vector<Vec2> velocity(std::size_t step, std::span<const Vec2> targets) const;
    /// Velocity at a point for the linearly interpolated history.
    Vec2 velocity_at_time(double t, Vec2 p) const;
};

/// Self-induced evolution of a particle field with passive tracers.
FlowTrajectorySet advect(const VortexParticleField& field, std::span<const Vec2> tracers, double T,
                         double dt, const GrowthBound& h);

/// Trajectories of tracked points under a steady analytic velocity.
FlowTrajectorySet advect(const AnalyticSField& u, std::span<const Vec2> tracked, double T, double dt,
                         const GrowthBound& h);

struct FlowBoundCheck {
    std::vector<double> times;
    std::vector<double> ratios;  ///< max_x |X(t,x) - x| / (F_t(|x|) t)
    double max_ratio = 0.0;
    double C0 = 0.0;
    bool pass = false;  ///< max_ratio <= 1.05 C0
};

/// Ratios at up to `max_times` stored times, over up to `max_tracks` tracks.
FlowBoundCheck flow_bound_check(const FlowTrajectorySet& traj, const GrowthBound& h,
                                std::size_t max_times = 24, std::size_t max_tracks = 2048);

/// Two-solution form |X1 - X2| / (F_t t); the reference constant is
/// C0(traj1) + C0(traj2). Both runs must share the time grid and tracks.
FlowBoundCheck flow_pair_bound_check(const FlowTrajectorySet& a, const FlowTrajectorySet& b,
                                     const GrowthBound& h, std::size_t max_times = 24,
                                     std::size_t max_tracks = 2048);

struct MocCheck {
    std::vector<double> times;
    std::vector<double> ratios;  ///< max over pairs of |X(t,x) - X(t,y)| / chi_t(|x - y|)
    double constant = 0.0;       ///< max over times
};

/// Pairs are all pairs among the tracks in [first_track, first_track + count).
MocCheck moc_check(const FlowTrajectorySet& traj, double C0, std::size_t first_track, std::size_t count,
                   std::size_t max_times = 24);

/// Backward RK4 on the recorded history from (t, y) to time 0.
Vec2 inverse_flow(const FlowTrajectorySet& traj, double t, Vec2 y);
/// Forward RK4 on the recorded history from (0, x) to time t.
Vec2 forward_flow(const FlowTrajectorySet& traj, double t, Vec2 x);

struct RotationEstimate {
    std::vector<double> times;
    std::vector<double> angles;  ///< principal-axis angle, unwrapped
    double rate = 0.0;           ///< least-squares slope
};

/// Principal-axis angle of the particle distribution from its second moments.
RotationEstimate rotation_rate(const FlowTrajectorySet& traj);

/// Largest |u(t, p) - u(0, p)| over stored steps and probes.
double velocity_drift(const FlowTrajectorySet& traj, std::span<const Vec2> probes);

/// Area of the convex hull of the given tracks at a stored step.
double hull_area(const FlowTrajectorySet& traj, std::size_t step, std::size_t first_track, std::size_t count);

}  // namespace growthflow
