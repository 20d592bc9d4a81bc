#include "growthflow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "growthflow/biot_savart.hpp"
#include "growthflow/errors.hpp"

namespace growthflow {

double VortexParticleField::circulation() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += omega[i] * areas[i];
    return s;
}

double VortexParticleField::total_area() const {
    double s = 0.0;
    for (double a : areas) s += a;
    return s;
}

double VortexParticleField::max_abs_omega() const {
    double m = 0.0;
    for (double w : omega) m = std::max(m, std::abs(w));
    return m;
}

Vec2 VortexParticleField::centroid() const {
    Vec2 c;
    const double g = circulation();
    if (g != 0.0) {
        for (std::size_t i = 0; i < size(); ++i) c += (omega[i] * areas[i]) * positions[i];
        return c / g;
    }
    const double a = total_area();
    if (a == 0.0) return c;
    for (std::size_t i = 0; i < size(); ++i) c += areas[i] * positions[i];
    return c / a;
}

void VortexParticleField::validate() const {
    if (omega.size() != size() || areas.size() != size())
        throw BadArgument("particle field arrays differ in length");
    for (std::size_t i = 0; i < size(); ++i) {
        if (!is_finite(positions[i]) || !std::isfinite(omega[i]))
            throw BadArgument("particle field has a non-finite entry at index " + std::to_string(i));
        if (!(areas[i] > 0.0) || !std::isfinite(areas[i]))
            throw BadArgument("particle field has a non-positive area at index " + std::to_string(i));
    }
}

VortexParticleField VortexParticleField::translated(Vec2 shift) const {
    VortexParticleField out = *this;
    for (Vec2& p : out.positions) p += shift;
    out.support_radius = support_radius + norm(shift);
    if (profile) {
        auto base = profile;
        out.profile = [base, shift](Vec2 x) { return base(x - shift); };
    }
    return out;
}

VortexParticleField VortexParticleField::scaled(double factor) const {
    VortexParticleField out = *this;
    for (double& w : out.omega) w *= factor;
    if (profile) {
        auto base = profile;
        out.profile = [base, factor](Vec2 x) { return factor * base(x); };
    }
    return out;
}

namespace {

VortexParticleField lattice_field(double half_width, int n, double region_area,
                                  const std::function<bool(Vec2)>& inside, double omega0) {
    const double h = 2.0 * half_width / n;
    VortexParticleField f;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Vec2 c{(i + 0.5) * h - half_width, (j + 0.5) * h - half_width};
            if (!inside(c)) continue;
            f.positions.push_back(c);
            f.omega.push_back(omega0);
            f.areas.push_back(h * h);
        }
    }
    const double scale = region_area / f.total_area();
    for (double& a : f.areas) a *= scale;
    f.support_radius = half_width;
    return f;
}

}  // namespace

VortexParticleField make_rankine(double R, double omega0, int n, Vec2 center) {
    if (!(R > 0.0)) throw BadArgument("make_rankine needs R > 0");
    if (n < 8) throw BadArgument("make_rankine needs n >= 8");
    if (!std::isfinite(omega0)) throw BadArgument("make_rankine needs a finite omega0");
    const auto inside = [R](Vec2 c) { return norm2(c) <= R * R; };
    VortexParticleField f = lattice_field(R, n, std::numbers::pi * R * R, inside, omega0);
    f.profile = [R, omega0](Vec2 x) { return norm2(x) <= R * R ? omega0 : 0.0; };
    return center == Vec2{} ? f : f.translated(center);
}

VortexParticleField make_kirchhoff(double a, double b, double omega0, int n) {
    if (!(a >= b && b > 0.0)) throw BadArgument("make_kirchhoff needs a >= b > 0");
    if (n < 8) throw BadArgument("make_kirchhoff needs n >= 8");
    if (!std::isfinite(omega0)) throw BadArgument("make_kirchhoff needs a finite omega0");
    const auto inside = [a, b](Vec2 c) { return (c.x * c.x) / (a * a) + (c.y * c.y) / (b * b) <= 1.0; };
    VortexParticleField f = lattice_field(a, n, std::numbers::pi * a * b, inside, omega0);
    f.profile = [inside, omega0](Vec2 x) { return inside(x) ? omega0 : 0.0; };
    return f;
}

// ---------------------------------------------------------------------------

Vec2 AnalyticSField::u(Vec2 x) const {
    const double r = norm(x);
    if (r == 0.0) return {};
    return (V(r) / r) * perp(x);
}

double AnalyticSField::omega(Vec2 x) const {
    const double r = norm(x);
    if (r == 0.0) return 2.0 * dV(0.0);
    return dV(r) + V(r) / r;
}

AnalyticSField rankine_velocity(double R, double omega0) {
    if (!(R > 0.0)) throw BadArgument("rankine_velocity needs R > 0");
    AnalyticSField f;
    f.label = "rankine";
    f.V = [R, omega0](double r) { return r <= R ? 0.5 * omega0 * r : 0.5 * omega0 * R * R / r; };
    f.dV = [R, omega0](double r) { return r <= R ? 0.5 * omega0 : -0.5 * omega0 * R * R / (r * r); };
    return f;
}

AnalyticSField power_velocity(double alpha) {
    AnalyticSField f;
    f.label = "power";
    f.V = [alpha](double r) { return r * std::pow(1.0 + r, alpha - 1.0); };
    f.dV = [alpha](double r) {
        return std::pow(1.0 + r, alpha - 1.0) + (alpha - 1.0) * r * std::pow(1.0 + r, alpha - 2.0);
    };
    return f;
}

AnalyticSField rigid_rotation(double omega) {
    AnalyticSField f;
    f.label = "rotation";
    f.V = [omega](double r) { return 0.5 * omega * r; };
    f.dV = [omega](double) { return 0.5 * omega; };
    return f;
}

AnalyticSField zero_velocity() {
    AnalyticSField f;
    f.label = "zero";
    f.V = [](double) { return 0.0; };
    f.dV = [](double) { return 0.0; };
    return f;
}

double s_h_norm(const AnalyticSField& u, const GrowthBound& h, std::span<const Vec2> grid) {
    if (grid.empty()) throw BadArgument("s_h_norm needs a nonempty grid");
    double vel = 0.0;
    double vort = 0.0;
    for (const Vec2 x : grid) {
        vel = std::max(vel, norm(u.u(x)) / h(norm(x)));
        vort = std::max(vort, std::abs(u.omega(x)));
    }
    return vel + vort;
}

double s_h_norm(const VortexParticleField& field, const GrowthBound& h, std::span<const Vec2> grid) {
    if (grid.empty()) throw BadArgument("s_h_norm needs a nonempty grid");
    if (field.empty()) return 0.0;
    const SourceCloud src = SourceCloud::from(field);
    const std::vector<Vec2> u = velocity_direct(src, grid);
    double vel = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) vel = std::max(vel, norm(u[i]) / h(norm(grid[i])));
    return vel + field.max_abs_omega();
}

std::vector<Vec2> sample_grid(double extent, int m, std::span<const double> ring_radii, int ring) {
    if (!(extent > 0.0) || m < 1) throw BadArgument("sample_grid needs extent > 0 and m >= 1");
    std::vector<Vec2> g;
    for (int j = -m; j <= m; ++j)
        for (int i = -m; i <= m; ++i) g.push_back({extent * i / m, extent * j / m});
    for (double r : ring_radii)
        for (int k = 0; k < ring; ++k) {
            const double th = 2.0 * std::numbers::pi * (k + 0.5) / ring;
            g.push_back({r * std::cos(th), r * std::sin(th)});
        }
    return g;
}

std::vector<std::pair<Vec2, Vec2>> morrey_samples(std::size_t count, double xmax, unsigned long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<std::pair<Vec2, Vec2>> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double rx = xmax * std::sqrt(uni(rng));
        const double tx = 2.0 * std::numbers::pi * uni(rng);
        const double ty = 2.0 * std::numbers::pi * uni(rng);
        const double reach = 1.0 + rx;
        // Half of the offsets are log-uniform down to 1e-8 of the reach.
        const double ry = (k % 2 == 0) ? reach * uni(rng) : reach * std::pow(10.0, -8.0 * uni(rng));
        out.push_back({{rx * std::cos(tx), rx * std::sin(tx)}, {ry * std::cos(ty), ry * std::sin(ty)}});
    }
    return out;
}

double morrey_modulus_check(const AnalyticSField& u, const GrowthBound& h,
                            std::span<const std::pair<Vec2, Vec2>> samples,
                            std::span<const Vec2> norm_grid) {
    const double nrm = s_h_norm(u, h, norm_grid);
    if (nrm == 0.0) return 0.0;
    double worst = 0.0;
    for (const auto& [x, y] : samples) {
        const double hx = h(norm(x));
        const double m = mubar(norm(y) / hx);
        if (m == 0.0) continue;
        worst = std::max(worst, norm(u.u(x + y) - u.u(x)) / (nrm * hx * m));
    }
    return worst;
}

}  // namespace growthflow
