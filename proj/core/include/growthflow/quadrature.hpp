#pragma once

#include <functional>
#include <span>
#include <vector>

namespace growthflow::quad {

using Integrand = std::function<double(double)>;

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Simpson on [a, b] with Richardson correction. The integrand is
/// never evaluated outside [a, b]; endpoints are evaluated.
Estimate adaptive_simpson(const Integrand& f, double a, double b, double rel_tol = 1e-10,
                          double abs_tol = 1e-300, int max_depth = 48);

/// Result of an improper integral over [r, infinity).
struct TailResult {
    double value = 0.0;
    bool converged = false;
    /// Largest s reached by the doubling sweep.
    double reach = 0.0;
    /// Ratio of the last two dyadic pieces; < 1 for geometric decay.
    double last_ratio = 0.0;
    /// Number of dyadic pieces [R, 2R] that were integrated.
    int pieces = 0;
};

/// Integral of f over [r, infinity). Each dyadic piece [R, 2R] is mapped by
/// w = 1/s onto [1/(2R), 1/R] and integrated with adaptive Simpson. The sweep
/// runs until the pieces are negligible, or up to s = max(1e12, r 2^24). Pieces
/// that keep decaying geometrically are summed as a geometric tail; pieces
/// whose ratio drifts toward (or above) one mark the integral divergent.
TailResult tail_integral(const Integrand& f, double r, double rel_tol = 1e-10);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

/// Composite Gauss-Legendre over the panels defined by consecutive breakpoints.
double composite_gauss(const Integrand& f, std::span<const double> breaks, int order);

/// Fixed-order tensor Gauss rule on a rectangle.
double gauss_rect(const std::function<double(double, double)>& f, double x0, double x1, double y0,
                  double y1, int order);

/// Adaptive quadtree cubature on a rectangle: a cell is accepted when its
/// tensor Gauss estimate agrees with the sum over its four children.
Estimate adaptive_rect(const std::function<double(double, double)>& f, double x0, double x1,
                       double y0, double y1, double abs_tol, int max_depth = 24, int order = 4);

}  // namespace growthflow::quad
