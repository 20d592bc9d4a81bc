#include "growthflow/biot_savart.hpp"

#include <algorithm>
#include <numbers>

#include "growthflow/errors.hpp"
#include "growthflow/fields.hpp"
#include "growthflow/kernel.hpp"
#include "growthflow/parallel.hpp"

namespace growthflow {

void SourceCloud::reserve(std::size_t n) {
    x.reserve(n);
    y.reserve(n);
    w.reserve(n);
    core2.reserve(n);
}

void SourceCloud::push(Vec2 p, double weight, double area) {
    x.push_back(p.x);
    y.push_back(p.y);
    w.push_back(weight);
    core2.push_back(kCoreFactor * kCoreFactor * area);
}

SourceCloud SourceCloud::from(std::span<const Vec2> positions, std::span<const double> omega,
                              std::span<const double> areas) {
    if (positions.size() != omega.size() || positions.size() != areas.size())
        throw BadArgument("SourceCloud: positions, omega and areas differ in length");
    SourceCloud s;
    s.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) s.push(positions[i], omega[i] * areas[i], areas[i]);
    return s;
}

SourceCloud SourceCloud::from(const VortexParticleField& field) {
    return from(field.positions, field.omega, field.areas);
}

Vec2 velocity_at(const SourceCloud& src, Vec2 p) {
    const std::size_t n = src.size();
    const double* xs = src.x.data();
    const double* ys = src.y.data();
    const double* ws = src.w.data();
    const double* cs = src.core2.data();
    double ux = 0.0;
    double uy = 0.0;
#pragma omp simd reduction(+ : ux, uy)
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = p.x - xs[i];
        const double dy = p.y - ys[i];
        const double r2 = dx * dx + dy * dy;
        const double inv = ws[i] / std::max(r2, 1e-300);
        const double f = r2 > cs[i] ? inv : 0.0;
        ux -= dy * f;
        uy += dx * f;
    }
    constexpr double inv = 0.5 / std::numbers::pi;
    return {ux * inv, uy * inv};
}

void velocity_direct(const SourceCloud& src, std::span<const Vec2> targets, std::span<Vec2> out) {
    if (out.size() != targets.size()) throw BadArgument("velocity_direct: output size mismatch");
    parallel_for(
        targets.size(),
        [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) out[i] = velocity_at(src, targets[i]);
        },
        16);
}

std::vector<Vec2> velocity_direct(const SourceCloud& src, std::span<const Vec2> targets) {
    std::vector<Vec2> out(targets.size());
    velocity_direct(src, targets, out);
    return out;
}

Vec2 cutoff_velocity_at(const SourceCloud& src, const CutoffKernel& kern, Vec2 p) {
    Vec2 sum;
    const double reach2 = kern.lambda() * kern.lambda();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Vec2 d{p.x - src.x[i], p.y - src.y[i]};
        const double r2 = norm2(d);
        if (r2 < src.core2[i] || r2 >= reach2 || src.w[i] == 0.0) continue;
        sum += src.w[i] * kern.near(d);
    }
    return sum;
}

}  // namespace growthflow
