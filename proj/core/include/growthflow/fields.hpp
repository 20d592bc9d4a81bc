#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "growthflow/growth_bounds.hpp"
#include "growthflow/vec2.hpp"

namespace growthflow {

/// Quadrature discretisation of a compactly supported bounded vorticity:
/// one particle per lattice cell, carrying the cell's vorticity and area.
struct VortexParticleField {
    std::vector<Vec2> positions;
    std::vector<double> omega;
    std::vector<double> areas;
    double support_radius = 0.0;
    /// Continuum vorticity the lattice was sampled from (may be empty).
    std::function<double(Vec2)> profile;

    std::size_t size() const { return positions.size(); }
    bool empty() const { return positions.empty(); }
    double circulation() const;
    double total_area() const;
    double max_abs_omega() const;
    /// Vorticity-weighted centre; falls back to the area centre when the
    /// circulation vanishes.
    Vec2 centroid() const;

    /// Throws BadArgument on non-finite entries, non-positive areas or
    /// mismatched lengths.
    void validate() const;

    VortexParticleField translated(Vec2 shift) const;
    VortexParticleField scaled(double factor) const;
};

/// Uniform disk of radius R and vorticity omega0 sampled on a lattice of
/// spacing 2R/n. Areas are rescaled so that they sum to pi R^2.
VortexParticleField make_rankine(double R, double omega0, int n, Vec2 center = {});

/// Uniform ellipse x^2/a^2 + y^2/b^2 <= 1 on a lattice of spacing 2a/n.
VortexParticleField make_kirchhoff(double a, double b, double omega0, int n);

/// Radial divergence-free field u = V(r) x^perp / r with vorticity V' + V/r.
struct AnalyticSField {
    std::string label;
    std::function<double(double)> V;
    std::function<double(double)> dV;

    Vec2 u(Vec2 x) const;
    double omega(Vec2 x) const;
};

/// Exact velocity of a Rankine vortex of radius R centred at the origin.
AnalyticSField rankine_velocity(double R, double omega0);
/// V(r) = r (1 + r)^(alpha - 1), in S_h for h = (1 + r)^alpha.
AnalyticSField power_velocity(double alpha);
/// V(r) = omega r / 2.
AnalyticSField rigid_rotation(double omega);
AnalyticSField zero_velocity();

/// max |u|/h over the grid plus max |omega| over the grid.
double s_h_norm(const AnalyticSField& u, const GrowthBound& h, std::span<const Vec2> grid);

/// Same for the velocity K * omega of a particle field. The vorticity part is
/// max |omega| over the particles.
double s_h_norm(const VortexParticleField& field, const GrowthBound& h, std::span<const Vec2> grid);

/// Square lattice of (2m+1)^2 points on [-extent, extent]^2 plus `ring`
/// points on each of the circles of radii `ring_radii`.
std::vector<Vec2> sample_grid(double extent, int m, std::span<const double> ring_radii = {},
                              int ring = 0);

/// Sample pairs (x, y) for the log-Lipschitz modulus check: |x| <= xmax and
/// |y| <= 1 + |x|, with a share of very short offsets.
std::vector<std::pair<Vec2, Vec2>> morrey_samples(std::size_t count, double xmax, unsigned long seed);

/// Largest |u(x+y) - u(x)| / (norm * h(x) * mubar(|y| / h(x))) over the
/// samples, where norm = s_h_norm(u, h, norm_grid).
double morrey_modulus_check(const AnalyticSField& u, const GrowthBound& h,
                            std::span<const std::pair<Vec2, Vec2>> samples,
                            std::span<const Vec2> norm_grid);

}  // namespace growthflow
