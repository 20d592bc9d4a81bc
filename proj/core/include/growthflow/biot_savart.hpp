#pragma once

#include <span>
#include <vector>

#include "growthflow/vec2.hpp"

namespace growthflow {

class CutoffKernel;
struct VortexParticleField;

/// Structure-of-arrays copy of a particle cloud for direct summation.
/// w = omega * area; core2 is the squared exclusion radius of each source.
struct SourceCloud {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> w;
    std::vector<double> core2;

    std::size_t size() const { return x.size(); }
    void reserve(std::size_t n);
    void push(Vec2 p, double weight, double area);

    static SourceCloud from(std::span<const Vec2> positions, std::span<const double> omega,
                            std::span<const double> areas);
    static SourceCloud from(const VortexParticleField& field);
};

/// Ratio of the exclusion radius to the local particle spacing sqrt(area).
inline constexpr double kCoreFactor = 0.4;

/// u(x) = sum_i K(x - p_i) w_i, dropping sources closer than their core.
Vec2 velocity_at(const SourceCloud& src, Vec2 x);

/// Same for many targets; parallel over targets.
void velocity_direct(const SourceCloud& src, std::span<const Vec2> targets, std::span<Vec2> out);
std::vector<Vec2> velocity_direct(const SourceCloud& src, std::span<const Vec2> targets);

/// sum_i a_lambda(x - p_i) K(x - p_i) w_i with the same exclusion rule.
Vec2 cutoff_velocity_at(const SourceCloud& src, const CutoffKernel& kern, Vec2 x);

}  // namespace growthflow
