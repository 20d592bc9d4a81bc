#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "growthflow/fields.hpp"
#include "growthflow/vec2.hpp"

namespace growthflow {

/// Smooth radial profile equal to 1 on [0, 1/2] and 0 on [1, inf). On the
/// transition band, with q = 2s - 1, a = B(1-q) / (B(1-q) + B(q)) and
/// B(t) = exp(-1/t).
class RadialCutoff {
  public:
    static constexpr double inner_radius = 0.5;
    static constexpr double outer_radius = 1.0;

    double operator()(double s) const;
    double d1(double s) const;
    double d2(double s) const;

    /// int_0^1 a(s) ds; exactly 3/4 for this profile by symmetry.
    static double integral();
};

/// K(x) = x^perp / (2 pi |x|^2). Throws SingularPoint at x = 0.
Vec2 biot_savart_K(Vec2 x);

/// Component [j][i][k] of a 2x2x2 array.
using Tensor3 = std::array<std::array<std::array<double, 2>, 2>, 2>;
/// Component [j][i] = d_i K^j (x).
using Matrix2 = std::array<std::array<double, 2>, 2>;

Matrix2 grad_K(Vec2 x);
/// [j][a][b] = d_a d_b K^j (x).
Tensor3 hessian_K(Vec2 x);

/// The pair (a, lambda) and the kernels built from them.
class CutoffKernel {
  public:
    explicit CutoffKernel(double lambda);

    double lambda() const { return lambda_; }
    const RadialCutoff& cutoff() const { return cutoff_; }

    /// a_lambda(x) = a(|x| / lambda).
    double a(Vec2 x) const;
    Vec2 grad_a(Vec2 x) const;
    /// [a][b] = d_a d_b a_lambda.
    Matrix2 hessian_a(Vec2 x) const;

    /// a_lambda(x) K(x); zero at the origin.
    Vec2 near(Vec2 x) const;

    /// phi_lambda = grad a_lambda . K^perp (a scalar bump supported on the band).
    double phi(Vec2 x) const;

    /// [j][i][k] = d_i d^perp_k [(1 - a_lambda) K^j](x) with d^perp = (-d_2, d_1).
    /// Identically zero on the closed disk of radius lambda/2.
    Tensor3 far_field_tensor(Vec2 x) const;

    /// [j][a][b] = d_a d_b [(1 - a_lambda) K^j](x).
    Tensor3 far_field_hessian(Vec2 x) const;

  private:
    double lambda_;
    RadialCutoff cutoff_;
};

/// sum_i a_lambda(x - p_i) K(x - p_i) omega_i A_i over the particle field,
/// skipping particles within 0.4 sqrt(A_i) of x. Throws EmptyField.
Vec2 near_field_convolve(const CutoffKernel& kern, const VortexParticleField& field, Vec2 x);

/// sum_{i,k} T[j][i][k] * (u^i u^k) for a far-field tensor and a velocity.
Vec2 contract_far_field(const Tensor3& T, Vec2 u);

/// ||a_lambda K||_{L^1} / lambda by polar quadrature (512 geometric radial
/// cells, 256 angles).
double kernel_l1_bound_check(const CutoffKernel& kern);

/// ||phi_lambda||_{L^1} by the same polar quadrature.
double phi_l1_norm(const CutoffKernel& kern);

struct LpCheck {
    double value = 0.0;         ///< ||K(x - .)||^p_{L^p(B_R)}
    double printed_bound = 0.0; ///< (2 pi (2 - p))^{p-2} |U|^{1 - p/2}
    double exact_bound = 0.0;   ///< value at the disk centre, the maximiser
    bool within_printed = false;
    bool within_exact = false;
};

/// ||K(x - .)||^p over the disk of radius R centred at the origin, with x at
/// `offset`. Radial integrals are done in closed form along 4096 rays.
/// Throws BadArgument unless 1 <= p < 2 and R > 0.
LpCheck lp_rearrangement_check(double R, double p, Vec2 offset = {});

/// A planar analytic field Z = grad^perp psi with curl Z = Laplacian psi.
struct StreamField {
    std::function<Vec2(Vec2)> Z;
    std::function<double(Vec2)> curl;
};
StreamField gaussian_stream_field();
StreamField trigonometric_stream_field();

struct CurlIdentitySample {
    Vec2 x;
    Vec2 lhs;  ///< (a_lambda K) * curl Z
    Vec2 rhs;  ///< Z - phi_lambda * Z
};

/// Evaluates both sides of (a_lambda K) * curl Z = Z - phi_lambda * Z at
/// the given points by polar quadrature over B_lambda(x).
std::vector<CurlIdentitySample> curl_identity_check(const CutoffKernel& kern, const StreamField& f,
                                                    std::span<const Vec2> points, int radial = 32,
                                                    int angular = 128);

/// ||K(x - z) - K(x - X2(z))||_{L^1_z(U)} for U the disk of radius rho
/// centred at the origin and a measure-preserving map X2.
double flow_difference_l1(Vec2 x, double rho, const std::function<Vec2(Vec2)>& X2, double abs_tol);

/// |int (a_lambda K(x - y) - a_lambda K(x - X2(y))) omega(y) dy| over the
/// disk of radius rho with omega = 1 there.
double cutoff_flow_difference(Vec2 x, double rho, double lambda,
                              const std::function<Vec2(Vec2)>& X2, double abs_tol);

/// z -> z + delta (sin z_2, 0): a shear with |X2 - id| <= delta.
std::function<Vec2(Vec2)> unit_shear(double delta);
/// z -> z + delta e_1.
std::function<Vec2(Vec2)> translation(double delta);

}  // namespace growthflow
