#include "growthflow/serfati.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "growthflow/errors.hpp"
#include "growthflow/kernel.hpp"
#include "growthflow/quadrature.hpp"

namespace growthflow {

namespace {

struct RadialNode {
    double rho;
    double weight;  // includes the polar Jacobian
};

std::vector<RadialNode> radial_nodes(std::span<const double> lambdas, double outer, const SerfatiOptions& opt) {
    std::vector<double> edges;
    for (double l : lambdas) {
        edges.push_back(0.5 * l);
        edges.push_back(l);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<double> breaks;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e)
        for (int p = 0; p < opt.band_panels; ++p)
            breaks.push_back(edges[e] + (edges[e + 1] - edges[e]) * p / opt.band_panels);
    double r = edges.back();
    breaks.push_back(r);
    while (r * opt.outer_ratio < outer) {
        r *= opt.outer_ratio;
        breaks.push_back(r);
    }
    if (breaks.back() < outer) breaks.push_back(outer);

    const quad::GaussRule& g = quad::gauss_legendre(opt.order);
    std::vector<RadialNode> nodes;
    for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
        const double half = 0.5 * (breaks[c + 1] - breaks[c]);
        const double mid = 0.5 * (breaks[c + 1] + breaks[c]);
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
            const double rho = mid + half * g.nodes[q];
            nodes.push_back({rho, half * g.weights[q] * rho});
        }
    }
    // Tail: rho = outer / w, rho d rho = outer^2 w^-3 dw on (0, 1].
    for (int p = 0; p < opt.tail_panels; ++p) {
        const double a = static_cast<double>(p) / opt.tail_panels;
        const double b = static_cast<double>(p + 1) / opt.tail_panels;
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
            const double w = mid + half * g.nodes[q];
            nodes.push_back({outer / w, half * g.weights[q] * outer * outer / (w * w * w)});
        }
    }
    return nodes;
}

// Quadrature nodes around one evaluation point with the weighted far-field
// tensors for every lambda.
struct FarGrid {
    std::vector<Vec2> points;
    std::vector<std::vector<Tensor3>> weighted;  // [lambda][node]
};

FarGrid far_grid(Vec2 x, std::span<const double> lambdas, double support, const SerfatiOptions& opt) {
    const double lmax = *std::max_element(lambdas.begin(), lambdas.end());
    const double outer =
        opt.outer_radius > 0.0 ? opt.outer_radius : std::max(8.0 * lmax, 2.0 * (norm(x) + support));
    const std::vector<RadialNode> radial = radial_nodes(lambdas, outer, opt);
    FarGrid g;
    const double dth = 2.0 * std::numbers::pi / opt.angular;
    std::vector<Vec2> dirs(opt.angular);
    for (int k = 0; k < opt.angular; ++k) dirs[k] = {std::cos((k + 0.5) * dth), std::sin((k + 0.5) * dth)};
    for (const RadialNode& rn : radial)
        for (const Vec2 e : dirs) g.points.push_back(x + rn.rho * e);

    g.weighted.resize(lambdas.size());
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
        const CutoffKernel kern(lambdas[l]);
        auto& w = g.weighted[l];
        w.reserve(g.points.size());
        std::size_t idx = 0;
        for (const RadialNode& rn : radial)
            for (std::size_t k = 0; k < dirs.size(); ++k, ++idx) {
                Tensor3 T = kern.far_field_tensor(x - g.points[idx]);
                for (auto& a : T)
                    for (auto& b : a)
                        for (double& c : b) c *= rn.weight * dth;
                w.push_back(T);
            }
    }
    return g;
}

double support_of(const FlowTrajectorySet& run) {
    double s = 0.0;
    for (const auto& snap : run.positions)
        for (std::size_t i = 0; i < run.n_particles; ++i) s = std::max(s, norm(snap[i]));
    return s;
}

}  // namespace

SerfatiResidual serfati_residual(const FlowTrajectorySet& run, std::span<const Vec2> eval_points,
                                 std::span<const double> times, std::span<const double> lambdas,
                                 const SerfatiOptions& opt) {
    if (run.steps() == 0) throw BadArgument("serfati_residual needs a recorded run");
    if (lambdas.empty()) throw BadArgument("serfati_residual needs at least one lambda");
    for (double l : lambdas)
        if (!(l > 0.0)) throw BadArgument("serfati_residual needs lambda > 0");
    if (opt.band_panels < 1 || opt.order < 1 || opt.angular < 8 || opt.tail_panels < 1 || opt.time_stride < 1 ||
        !(opt.outer_ratio > 1.0))
        throw BadArgument("invalid Serfati quadrature options");

    std::vector<std::size_t> steps;
    for (double t : times) steps.push_back(run.step_of(t));

    SerfatiResidual res;
    res.eval_points.assign(eval_points.begin(), eval_points.end());
    res.times.assign(times.begin(), times.end());
    res.lambdas.assign(lambdas.begin(), lambdas.end());
    const auto shape = [&] {
        return std::vector<std::vector<std::vector<Vec2>>>(
            lambdas.size(), std::vector<std::vector<Vec2>>(times.size(), std::vector<Vec2>(eval_points.size())));
    };
    res.lhs = shape();
    res.rhs = shape();
    res.near = shape();
    res.far = shape();
    res.residual_norm.assign(lambdas.size(), 0.0);

    // Left side and near-field term.
    const std::vector<Vec2> u0 = run.velocity(0, eval_points);
    const SourceCloud c0 = SourceCloud::from(run.field_at(0));
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const std::vector<Vec2> ut = run.velocity(steps[ti], eval_points);
        const SourceCloud ct = SourceCloud::from(run.field_at(steps[ti]));
        for (std::size_t l = 0; l < lambdas.size(); ++l) {
            const CutoffKernel kern(lambdas[l]);
            for (std::size_t p = 0; p < eval_points.size(); ++p) {
                res.lhs[l][ti][p] = ut[p] - u0[p];
                if (run.n_particles > 0)
                    res.near[l][ti][p] =
                        cutoff_velocity_at(ct, kern, eval_points[p]) - cutoff_velocity_at(c0, kern, eval_points[p]);
            }
        }
    }

    // Far-field term: trapezoid in time over strided steps plus every requested step.
    const std::size_t last = *std::max_element(steps.begin(), steps.end());
    std::vector<std::size_t> samples;
    for (std::size_t k = 0; k <= last; k += opt.time_stride) samples.push_back(k);
    samples.insert(samples.end(), steps.begin(), steps.end());
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

    const double support = support_of(run);
    for (std::size_t p = 0; p < eval_points.size(); ++p) {
        const FarGrid grid = far_grid(eval_points[p], lambdas, support, opt);
        std::vector<Vec2> cumulative(lambdas.size());
        std::vector<Vec2> prev(lambdas.size());
        double prev_t = 0.0;
        for (std::size_t si = 0; si < samples.size(); ++si) {
            const std::size_t k = samples[si];
            const double t = run.times[k];
            const std::vector<Vec2> u = run.velocity(k, grid.points);
            for (std::size_t l = 0; l < lambdas.size(); ++l) {
                Vec2 F;
                const auto& W = grid.weighted[l];
                for (std::size_t n = 0; n < u.size(); ++n) F += contract_far_field(W[n], u[n]);
                if (si > 0) cumulative[l] += (0.5 * (t - prev_t)) * (F + prev[l]);
                prev[l] = F;
            }
            prev_t = t;
            for (std::size_t ti = 0; ti < times.size(); ++ti)
                if (steps[ti] == k)
                    for (std::size_t l = 0; l < lambdas.size(); ++l) res.far[l][ti][p] = cumulative[l];
        }
    }

    for (std::size_t l = 0; l < lambdas.size(); ++l)
        for (std::size_t ti = 0; ti < times.size(); ++ti)
            for (std::size_t p = 0; p < eval_points.size(); ++p) {
                res.rhs[l][ti][p] = res.near[l][ti][p] - res.far[l][ti][p];
                const double err = norm(res.lhs[l][ti][p] - res.rhs[l][ti][p]);
                res.residual_norm[l] = std::max(res.residual_norm[l], err);
                res.max_residual = std::max(res.max_residual, err);
            }
    return res;
}

Vec2 serfati_rhs(const FlowTrajectorySet& run, Vec2 x, double t, double lambda, const SerfatiOptions& opt) {
    const Vec2 pts[1] = {x};
    const double ts[1] = {t};
    const double ls[1] = {lambda};
    return serfati_residual(run, pts, ts, ls, opt).rhs[0][0][0];
}

LambdaStar lambda_star(const GrowthBound& h, Vec2 x, const std::function<double(double)>& Lambda, double t) {
    if (!(t >= 0.0)) throw BadArgument("lambda_star needs t >= 0");
    double integral = 0.0;
    if (t > 0.0) integral = quad::adaptive_simpson(Lambda, 0.0, t, 1e-12).value;
    if (integral < 0.0) throw BadArgument("lambda_star needs a nonnegative Lambda history");
    LambdaStar out;
    out.lambda = 2.0 * h(norm(x)) * std::sqrt(integral);
    out.degenerate = out.lambda == 0.0;
    return out;
}

}  // namespace growthflow
