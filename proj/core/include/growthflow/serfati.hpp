#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "growthflow/flow.hpp"
#include "growthflow/growth_bounds.hpp"
#include "growthflow/vec2.hpp"

namespace growthflow {

/// Polar quadrature of the far-field convolution around an evaluation point.
/// Radii below the largest lambda are split at every lambda/2 and lambda,
/// each interval into `band_panels` Gauss panels; beyond that, geometric
/// panels up to `outer_radius` and a tail mapped by w = outer_radius / r.
struct SerfatiOptions {
    int band_panels = 4;
    int order = 8;
    int angular = 128;
    double outer_ratio = 1.5;
    /// 0 picks max(8 max(lambda), 2 (|x| + support radius)).
    double outer_radius = 0.0;
    int tail_panels = 2;
    /// Far-field time samples are every `time_stride`-th stored step.
    std::size_t time_stride = 1;
};

struct SerfatiResidual {
    std::vector<Vec2> eval_points;
    std::vector<double> times;
    std::vector<double> lambdas;
    /// Indexed [lambda][time][point].
    std::vector<std::vector<std::vector<Vec2>>> lhs;
    std::vector<std::vector<std::vector<Vec2>>> rhs;
    std::vector<std::vector<std::vector<Vec2>>> near;
    std::vector<std::vector<std::vector<Vec2>>> far;
    std::vector<double> residual_norm;  ///< per lambda: max |lhs - rhs|
    double max_residual = 0.0;
};

/// Both sides of the identity at every (lambda, t, x). The left side is
/// u(t, x) - u(0, x) from the recorded particles; the right side is the
/// near-field term minus the time-integrated far-field term.
SerfatiResidual serfati_residual(const FlowTrajectorySet& run, std::span<const Vec2> eval_points,
                                 std::span<const double> times, std::span<const double> lambdas,
                                 const SerfatiOptions& opt = {});

/// Right-hand side at a single (x, t, lambda). Throws BadArgument for t
/// outside the run.
Vec2 serfati_rhs(const FlowTrajectorySet& run, Vec2 x, double t, double lambda, const SerfatiOptions& opt = {});

struct LambdaStar {
    double lambda = 0.0;
    bool degenerate = false;  ///< lambda == 0: no cutoff
};

/// lambda = 2 h(|x|) (int_0^t Lambda)^{1/2}.
LambdaStar lambda_star(const GrowthBound& h, Vec2 x, const std::function<double(double)>& Lambda, double t);

}  // namespace growthflow
