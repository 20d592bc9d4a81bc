#include "growthflow/kernel.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "growthflow/biot_savart.hpp"
#include "growthflow/errors.hpp"
#include "growthflow/quadrature.hpp"

namespace growthflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
using cplx = std::complex<double>;

struct Logistic {
    double f;    // 1 / (1 + e^phi)
    double s1;   // f (1 - f)
    double p1;   // phi'
    double p2;   // phi''
};

// phi(q) = -1/q + 1/(1-q) on (0, 1).
Logistic logistic(double q) {
    const double r = 1.0 - q;
    const double phi = -1.0 / q + 1.0 / r;
    Logistic out{};
    out.f = 1.0 / (1.0 + std::exp(phi));
    const double c = std::cosh(0.5 * phi);
    out.s1 = 1.0 / (4.0 * c * c);
    out.p1 = 1.0 / (q * q) + 1.0 / (r * r);
    out.p2 = -2.0 / (q * q * q) + 2.0 / (r * r * r);
    return out;
}

// Complex form Kc = K^1 - i K^2 = -i / (2 pi z); d_1 = d/dz and d_2 = i d/dz.
constexpr cplx kDir[2] = {cplx(1.0, 0.0), cplx(0.0, 1.0)};

}  // namespace

double RadialCutoff::operator()(double s) const {
    if (s <= inner_radius) return 1.0;
    if (s >= outer_radius) return 0.0;
    return logistic(2.0 * s - 1.0).f;
}

double RadialCutoff::d1(double s) const {
    if (s <= inner_radius || s >= outer_radius) return 0.0;
    const Logistic l = logistic(2.0 * s - 1.0);
    return -2.0 * l.s1 * l.p1;
}

double RadialCutoff::d2(double s) const {
    if (s <= inner_radius || s >= outer_radius) return 0.0;
    const Logistic l = logistic(2.0 * s - 1.0);
    const double f1 = -l.s1 * l.p1;
    const double f2 = -f1 * (1.0 - 2.0 * l.f) * l.p1 - l.s1 * l.p2;
    return 4.0 * f2;
}

double RadialCutoff::integral() {
    static const double value = [] {
        const RadialCutoff a;
        return 0.5 + quad::adaptive_simpson([&a](double s) { return a(s); }, 0.5, 1.0, 1e-14).value;
    }();
    return value;
}

Vec2 biot_savart_K(Vec2 x) {
    const double r2 = norm2(x);
    if (r2 == 0.0) throw SingularPoint("Biot-Savart kernel evaluated at the origin");
    return perp(x) / (kTwoPi * r2);
}

Matrix2 grad_K(Vec2 x) {
    if (norm2(x) == 0.0) throw SingularPoint("grad K evaluated at the origin");
    const cplx z(x.x, x.y);
    const cplx d = cplx(0.0, 1.0) / (kTwoPi * z * z);
    Matrix2 g{};
    for (int i = 0; i < 2; ++i) {
        const cplx v = kDir[i] * d;
        g[0][i] = v.real();
        g[1][i] = -v.imag();
    }
    return g;
}

Tensor3 hessian_K(Vec2 x) {
    if (norm2(x) == 0.0) throw SingularPoint("hessian of K evaluated at the origin");
    const cplx z(x.x, x.y);
    const cplx d2 = cplx(0.0, -1.0) / (kPi * z * z * z);
    Tensor3 H{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const cplx v = kDir[a] * kDir[b] * d2;
            H[0][a][b] = v.real();
            H[1][a][b] = -v.imag();
        }
    return H;
}

// ---------------------------------------------------------------------------

CutoffKernel::CutoffKernel(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw BadArgument("cutoff scale lambda must be positive");
}

double CutoffKernel::a(Vec2 x) const { return cutoff_(norm(x) / lambda_); }

Vec2 CutoffKernel::grad_a(Vec2 x) const {
    const double r = norm(x);
    const double s = r / lambda_;
    if (s <= RadialCutoff::inner_radius || s >= RadialCutoff::outer_radius) return {};
    return (cutoff_.d1(s) / (lambda_ * r)) * x;
}

Matrix2 CutoffKernel::hessian_a(Vec2 x) const {
    Matrix2 H{};
    const double r = norm(x);
    const double s = r / lambda_;
    if (s <= RadialCutoff::inner_radius || s >= RadialCutoff::outer_radius) return H;
    const double e[2] = {x.x / r, x.y / r};
    const double A1 = cutoff_.d1(s) / (lambda_ * r);
    const double A2 = cutoff_.d2(s) / (lambda_ * lambda_);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            H[i][j] = A2 * e[i] * e[j] + A1 * ((i == j ? 1.0 : 0.0) - e[i] * e[j]);
    return H;
}

Vec2 CutoffKernel::near(Vec2 x) const {
    const double r2 = norm2(x);
    if (r2 == 0.0) return {};
    const double w = a(x);
    if (w == 0.0) return {};
    return (w / (kTwoPi * r2)) * perp(x);
}

double CutoffKernel::phi(Vec2 x) const {
    if (norm2(x) == 0.0) return 0.0;
    const Vec2 g = grad_a(x);
    const Vec2 k = biot_savart_K(x);
    return dot(g, perp(k));
}

Tensor3 CutoffKernel::far_field_hessian(Vec2 x) const {
    Tensor3 out{};
    const double r = norm(x);
    if (r <= RadialCutoff::inner_radius * lambda_) return out;
    const Tensor3 HK = hessian_K(x);
    if (r >= RadialCutoff::outer_radius * lambda_) return HK;

    const double one_minus_a = 1.0 - a(x);
    const Vec2 ga = grad_a(x);
    const double g[2] = {ga.x, ga.y};
    const Matrix2 Ha = hessian_a(x);
    const Matrix2 GK = grad_K(x);
    const Vec2 k = biot_savart_K(x);
    const double kv[2] = {k.x, k.y};
    for (int j = 0; j < 2; ++j)
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q)
                out[j][p][q] = one_minus_a * HK[j][p][q] - g[p] * GK[j][q] - g[q] * GK[j][p] -
                               kv[j] * Ha[p][q];
    return out;
}

Tensor3 CutoffKernel::far_field_tensor(Vec2 x) const {
    const Tensor3 H = far_field_hessian(x);
    Tensor3 T{};
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
            T[j][i][0] = -H[j][i][1];
            T[j][i][1] = H[j][i][0];
        }
    return T;
}

Vec2 contract_far_field(const Tensor3& T, Vec2 u) {
    const double v[2] = {u.x, u.y};
    double out[2] = {0.0, 0.0};
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) out[j] += T[j][i][k] * v[i] * v[k];
    return {out[0], out[1]};
}

Vec2 near_field_convolve(const CutoffKernel& kern, const VortexParticleField& field, Vec2 x) {
    if (field.empty()) throw EmptyField("near_field_convolve on an empty particle field");
    Vec2 sum;
    for (std::size_t i = 0; i < field.size(); ++i) {
        const Vec2 d = x - field.positions[i];
        const double core = kCoreFactor * kCoreFactor * field.areas[i];
        if (norm2(d) < core) continue;
        sum += (field.omega[i] * field.areas[i]) * kern.near(d);
    }
    return sum;
}

// ---------------------------------------------------------------------------

namespace {

// Polar quadrature of a 2D integrand over the disk of radius lambda: 384
// geometric cells on [1e-6 lambda, lambda/2], 128 on [lambda/2, lambda],
// one cell on [0, 1e-6 lambda], Gauss order 8, 256 angles.
double polar_disk(const std::function<double(Vec2)>& f, double lambda) {
    std::vector<double> breaks{0.0};
    const double r0 = 1e-6 * lambda;
    for (int i = 0; i <= 384; ++i) breaks.push_back(r0 * std::pow(0.5 * lambda / r0, i / 384.0));
    for (int i = 1; i <= 128; ++i) breaks.push_back(0.5 * lambda * std::pow(2.0, i / 128.0));
    breaks.back() = lambda;
    constexpr int angles = 256;
    const quad::GaussRule& g = quad::gauss_legendre(8);
    double total = 0.0;
    for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
        const double a = breaks[c];
        const double b = breaks[c + 1];
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double cell = 0.0;
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
            const double r = mid + half * g.nodes[q];
            double ring = 0.0;
            for (int k = 0; k < angles; ++k) {
                const double th = kTwoPi * (k + 0.5) / angles;
                ring += f({r * std::cos(th), r * std::sin(th)});
            }
            cell += g.weights[q] * r * ring * (kTwoPi / angles);
        }
        total += half * cell;
    }
    return total;
}

}  // namespace

double kernel_l1_bound_check(const CutoffKernel& kern) {
    const double l1 = polar_disk([&kern](Vec2 y) { return norm(kern.near(y)); }, kern.lambda());
    return l1 / kern.lambda();
}

double phi_l1_norm(const CutoffKernel& kern) {
    return polar_disk([&kern](Vec2 y) { return std::abs(kern.phi(y)); }, kern.lambda());
}

LpCheck lp_rearrangement_check(double R, double p, Vec2 offset) {
    if (!(p >= 1.0 && p < 2.0)) throw BadArgument("lp_rearrangement_check needs 1 <= p < 2");
    if (!(R > 0.0)) throw BadArgument("lp_rearrangement_check needs R > 0");
    if (norm(offset) > R) throw BadArgument("lp_rearrangement_check needs the point inside the disk");
    constexpr int rays = 4096;
    double sum = 0.0;
    for (int k = 0; k < rays; ++k) {
        const double th = kTwoPi * (k + 0.5) / rays;
        const Vec2 e{std::cos(th), std::sin(th)};
        const double b = dot(offset, e);
        const double c = norm2(offset) - R * R;
        const double rho = std::max(0.0, -b + std::sqrt(std::max(0.0, b * b - c)));
        // int_0^rho (2 pi s)^{-p} s ds
        sum += std::pow(kTwoPi, -p) * std::pow(rho, 2.0 - p) / (2.0 - p);
    }
    LpCheck out;
    out.value = sum * kTwoPi / rays;
    const double area = kPi * R * R;
    out.printed_bound = std::pow(kTwoPi * (2.0 - p), p - 2.0) * std::pow(area, 1.0 - 0.5 * p);
    out.exact_bound = std::pow(kTwoPi, 1.0 - p) * std::pow(R, 2.0 - p) / (2.0 - p);
    out.within_printed = out.value <= out.printed_bound;
    out.within_exact = out.value <= out.exact_bound * (1.0 + 1e-12);
    return out;
}

// ---------------------------------------------------------------------------

StreamField gaussian_stream_field() {
    StreamField f;
    f.Z = [](Vec2 x) {
        const double psi = std::exp(-norm2(x));
        return Vec2{2.0 * x.y * psi, -2.0 * x.x * psi};
    };
    f.curl = [](Vec2 x) {
        const double r2 = norm2(x);
        return (4.0 * r2 - 4.0) * std::exp(-r2);
    };
    return f;
}

StreamField trigonometric_stream_field() {
    StreamField f;
    f.Z = [](Vec2 x) {
        return Vec2{2.0 * std::sin(x.x) * std::sin(2.0 * x.y), std::cos(x.x) * std::cos(2.0 * x.y)};
    };
    f.curl = [](Vec2 x) { return -5.0 * std::sin(x.x) * std::cos(2.0 * x.y); };
    return f;
}

std::vector<CurlIdentitySample> curl_identity_check(const CutoffKernel& kern, const StreamField& f,
                                                    std::span<const Vec2> points, int radial,
                                                    int angular) {
    if (radial < 1 || angular < 8) throw BadArgument("curl_identity_check needs radial >= 1, angular >= 8");
    const double lam = kern.lambda();
    std::vector<double> breaks;
    for (int i = 0; i <= radial; ++i) breaks.push_back(0.5 * lam * i / radial);
    for (int i = 1; i <= 2 * radial; ++i) breaks.push_back(0.5 * lam + 0.5 * lam * i / (2 * radial));
    const quad::GaussRule& g = quad::gauss_legendre(8);

    std::vector<CurlIdentitySample> out;
    out.reserve(points.size());
    for (const Vec2 x : points) {
        Vec2 lhs;
        Vec2 mol;
        for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
            const double half = 0.5 * (breaks[c + 1] - breaks[c]);
            const double mid = 0.5 * (breaks[c + 1] + breaks[c]);
            for (std::size_t q = 0; q < g.nodes.size(); ++q) {
                const double rho = mid + half * g.nodes[q];
                const double wr = half * g.weights[q] * rho * (kTwoPi / angular);
                for (int k = 0; k < angular; ++k) {
                    const double th = kTwoPi * (k + 0.5) / angular;
                    const Vec2 d{rho * std::cos(th), rho * std::sin(th)};
                    const Vec2 y = x - d;
                    lhs += (wr * f.curl(y)) * kern.near(d);
                    const double ph = kern.phi(d);
                    if (ph != 0.0) mol += (wr * ph) * f.Z(y);
                }
            }
        }
        out.push_back({x, lhs, f.Z(x) - mol});
    }
    return out;
}

// ---------------------------------------------------------------------------

double flow_difference_l1(Vec2 x, double rho, const std::function<Vec2(Vec2)>& X2, double abs_tol) {
    if (!(rho > 0.0)) throw BadArgument("flow_difference_l1 needs rho > 0");
    const auto integrand = [&](double r, double th) {
        const Vec2 z{r * std::cos(th), r * std::sin(th)};
        const Vec2 d1 = x - z;
        const Vec2 d2 = x - X2(z);
        if (norm2(d1) == 0.0 || norm2(d2) == 0.0) return 0.0;
        return r * norm(biot_savart_K(d1) - biot_savart_K(d2));
    };
    return quad::adaptive_rect(integrand, 0.0, rho, 0.0, kTwoPi, abs_tol, 22).value;
}

double cutoff_flow_difference(Vec2 x, double rho, double lambda,
                              const std::function<Vec2(Vec2)>& X2, double abs_tol) {
    if (!(rho > 0.0)) throw BadArgument("cutoff_flow_difference needs rho > 0");
    const CutoffKernel kern(lambda);
    double comp[2];
    for (int c = 0; c < 2; ++c) {
        const auto integrand = [&, c](double r, double th) {
            const Vec2 z{r * std::cos(th), r * std::sin(th)};
            const Vec2 v = kern.near(x - z) - kern.near(x - X2(z));
            return r * (c == 0 ? v.x : v.y);
        };
        comp[c] = quad::adaptive_rect(integrand, 0.0, rho, 0.0, kTwoPi, abs_tol, 22).value;
    }
    return std::hypot(comp[0], comp[1]);
}

std::function<Vec2(Vec2)> unit_shear(double delta) {
    return [delta](Vec2 z) { return Vec2{z.x + delta * std::sin(z.y), z.y}; };
}

std::function<Vec2(Vec2)> translation(double delta) {
    return [delta](Vec2 z) { return Vec2{z.x + delta, z.y}; };
}

}  // namespace growthflow
