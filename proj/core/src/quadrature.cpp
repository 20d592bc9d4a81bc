#include "growthflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace growthflow::quad {

namespace {

struct SimpsonCtx {
    const Integrand& f;
    double abs_floor;
};

double simpson_rec(const SimpsonCtx& ctx, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth, double& err) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = ctx.f(lm);
    const double frm = ctx.f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * std::max(tol, ctx.abs_floor) || m <= a || b <= m) {
        err += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return simpson_rec(ctx, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err) +
           simpson_rec(ctx, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err);
}

}  // namespace

Estimate adaptive_simpson(const Integrand& f, double a, double b, double rel_tol, double abs_tol,
                          int max_depth) {
    if (a == b) return {};
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);

    // A coarse pass fixes the scale for the relative tolerance.
    double err = 0.0;
    SimpsonCtx coarse{f, abs_tol};
    const double rough = simpson_rec(coarse, a, b, fa, fm, fb, whole, std::abs(whole) * 1e-3 + abs_tol,
                                     std::min(max_depth, 12), err);
    const double scale = std::max(std::abs(rough), std::abs(whole));
    err = 0.0;
    SimpsonCtx fine{f, abs_tol};
    const double value =
        simpson_rec(fine, a, b, fa, fm, fb, whole, std::max(rel_tol * scale, abs_tol), max_depth, err);
    return {value, err};
}

TailResult tail_integral(const Integrand& f, double r, double rel_tol) {
    TailResult out;
    const double s_limit = std::max(1e12, r * std::ldexp(1.0, 40));
    const auto piece = [&](double lo, double hi) {
        // s = 1/w, ds = -dw / w^2
        const Integrand g = [&](double w) { return f(1.0 / w) / (w * w); };
        return adaptive_simpson(g, 1.0 / hi, 1.0 / lo, rel_tol * 1e-2, 1e-300, 40).value;
    };

    std::vector<double> ratios;
    double sum = 0.0;
    double prev = 0.0;
    double lo = r;
    while (true) {
        const double hi = 2.0 * lo;
        const double p = piece(lo, hi);
        if (!std::isfinite(p)) {
            out.value = p;
            out.converged = false;
            out.reach = hi;
            return out;
        }
        sum += p;
        ++out.pieces;
        if (out.pieces > 1 && prev != 0.0) ratios.push_back(p / prev);
        prev = p;
        lo = hi;
        out.reach = hi;
        if (!ratios.empty()) out.last_ratio = ratios.back();

        const bool decaying = ratios.size() >= 3 && ratios.back() < 1.0;
        if (decaying && std::abs(p) <= 1e-3 * rel_tol * std::abs(sum)) {
            out.value = sum;
            out.converged = true;
            return out;
        }
        if (hi >= s_limit) break;
    }

    // Reached the sweep limit without the pieces becoming negligible. Accept a
    // geometric tail if the ratios stay well below one and the drift of the
    // ratio over the last ten pieces barely moves the extrapolated remainder.
    const std::size_t k = ratios.size();
    if (k >= 12) {
        const double q = ratios[k - 1];
        const double q_earlier = ratios[k - 11];
        const double tail = prev * q / (1.0 - q);
        const double spread = std::abs(tail - prev * q_earlier / (1.0 - q_earlier));
        if (q < 0.9 && q_earlier < 0.9 && spread <= rel_tol * std::abs(sum + tail)) {
            out.value = sum + tail;
            out.converged = true;
            return out;
        }
    }
    out.value = sum;
    out.converged = false;
    return out;
}

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) { p1 = x; p0 = 1.0; }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return cache.emplace(n, std::move(rule)).first->second;
}

double composite_gauss(const Integrand& f, std::span<const double> breaks, int order) {
    const GaussRule& g = gauss_legendre(order);
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p];
        const double b = breaks[p + 1];
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double s = 0.0;
        for (int i = 0; i < order; ++i) s += g.weights[i] * f(mid + half * g.nodes[i]);
        total += half * s;
    }
    return total;
}

double gauss_rect(const std::function<double(double, double)>& f, double x0, double x1, double y0,
                  double y1, int order) {
    const GaussRule& g = gauss_legendre(order);
    const double hx = 0.5 * (x1 - x0), mx = 0.5 * (x0 + x1);
    const double hy = 0.5 * (y1 - y0), my = 0.5 * (y0 + y1);
    double s = 0.0;
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j)
            s += g.weights[i] * g.weights[j] * f(mx + hx * g.nodes[i], my + hy * g.nodes[j]);
    return hx * hy * s;
}

namespace {

struct RectCtx {
    const std::function<double(double, double)>& f;
    int order;
};

double rect_rec(const RectCtx& ctx, double x0, double x1, double y0, double y1, double whole,
                double tol, int depth, double& err) {
    const double xm = 0.5 * (x0 + x1);
    const double ym = 0.5 * (y0 + y1);
    const double q[4] = {
        gauss_rect(ctx.f, x0, xm, y0, ym, ctx.order),
        gauss_rect(ctx.f, xm, x1, y0, ym, ctx.order),
        gauss_rect(ctx.f, x0, xm, ym, y1, ctx.order),
        gauss_rect(ctx.f, xm, x1, ym, y1, ctx.order),
    };
    const double sum = q[0] + q[1] + q[2] + q[3];
    if (depth <= 0 || std::abs(sum - whole) <= tol) {
        err += std::abs(sum - whole);
        return sum;
    }
    const double t = 0.25 * tol;
    return rect_rec(ctx, x0, xm, y0, ym, q[0], t, depth - 1, err) +
           rect_rec(ctx, xm, x1, y0, ym, q[1], t, depth - 1, err) +
           rect_rec(ctx, x0, xm, ym, y1, q[2], t, depth - 1, err) +
           rect_rec(ctx, xm, x1, ym, y1, q[3], t, depth - 1, err);
}

}  // namespace

Estimate adaptive_rect(const std::function<double(double, double)>& f, double x0, double x1,
                       double y0, double y1, double abs_tol, int max_depth, int order) {
    RectCtx ctx{f, order};
    double err = 0.0;
    const double whole = gauss_rect(f, x0, x1, y0, y1, order);
    const double v = rect_rec(ctx, x0, x1, y0, y1, whole, abs_tol, max_depth, err);
    return {v, err};
}

}  // namespace growthflow::quad
