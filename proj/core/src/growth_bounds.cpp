#include "growthflow/growth_bounds.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "growthflow/errors.hpp"
#include "growthflow/quadrature.hpp"

namespace growthflow {

namespace {

constexpr double kE = std::numbers::e;

double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) throw BadArgument("cannot parse " + what + " from '" + s + "'");
    return v;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

const char* to_string(Tier t) {
    switch (t) {
        case Tier::Unclassified: return "Unclassified";
        case Tier::PreGrowth: return "PreGrowth";
        case Tier::Growth: return "Growth";
        case Tier::WellPosedness: return "WellPosedness";
        case Tier::GlobalWellPosedness: return "GlobalWellPosedness";
    }
    return "?";
}

const char* to_string(EnvelopeShape s) {
    switch (s) {
        case EnvelopeShape::Linear: return "linear";
        case EnvelopeShape::LogLinear: return "loglinear";
        case EnvelopeShape::Quadratic: return "quadratic";
    }
    return "?";
}

// ---------------------------------------------------------------------------

GrowthBound::GrowthBound(std::string label, Fn eval, Fn deriv)
    : label_(std::move(label)), eval_(std::move(eval)), deriv_(std::move(deriv)) {
    if (!eval_) throw BadArgument("growth bound '" + label_ + "' has no evaluation function");
}

double GrowthBound::derivative(double r) const {
    if (deriv_) return deriv_(r);
    constexpr double step = 1e-6;
    return (eval_(r + step) - eval_(r)) / step;
}

GrowthBound GrowthBound::with_tier(Tier t) const {
    GrowthBound copy = *this;
    copy.tier_ = t;
    return copy;
}

GrowthBound GrowthBound::squared() const {
    const GrowthBound self = *this;
    Fn deriv;
    if (deriv_) deriv = [self](double r) { return 2.0 * self(r) * self.derivative(r); };
    return GrowthBound(label_ + "^2", [self](double r) { const double v = self(r); return v * v; },
                       std::move(deriv));
}

GrowthBound constant_bound(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw BadArgument("constant bound needs c > 0");
    return GrowthBound(c == 1.0 ? "const" : "const:" + fmt(c), [c](double) { return c; },
                       [](double) { return 0.0; });
}

GrowthBound power_bound(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw BadArgument("power bound needs alpha in [0, 1]");
    return GrowthBound(
        "power:" + fmt(alpha), [alpha](double r) { return std::pow(1.0 + r, alpha); },
        [alpha](double r) { return alpha * std::pow(1.0 + r, alpha - 1.0); });
}

GrowthBound quarterlog_bound() {
    return GrowthBound(
        "quarterlog", [](double r) { return std::pow(std::log(kE + r), 0.25); },
        [](double r) {
            const double l = std::log(kE + r);
            return 0.25 * std::pow(l, -0.75) / (kE + r);
        });
}

GrowthBound linear_bound() {
    return GrowthBound("linear", [](double r) { return 1.0 + r; }, [](double) { return 1.0; });
}

GrowthBound bound_from_id(const std::string& id) {
    if (id == "const") return constant_bound(1.0);
    if (id.rfind("const:", 0) == 0) return constant_bound(parse_double(id.substr(6), "constant"));
    if (id.rfind("power:", 0) == 0) return power_bound(parse_double(id.substr(6), "alpha"));
    if (id == "quarterlog") return quarterlog_bound();
    if (id == "linear") return linear_bound();
    throw BadArgument("unknown growth bound identifier '" + id + "'");
}

GrowthBound quotient_bound(const GrowthBound& num, const GrowthBound& den) {
    return GrowthBound(
        num.label() + "/" + den.label(), [num, den](double r) { return num(r) / den(r); },
        [num, den](double r) {
            const double d = den(r);
            return (num.derivative(r) * d - num(r) * den.derivative(r)) / (d * d);
        });
}

GrowthBound product_bound(const GrowthBound& a, const GrowthBound& b) {
    return GrowthBound(
        a.label() + "*" + b.label(), [a, b](double r) { return a(r) * b(r); },
        [a, b](double r) { return a.derivative(r) * b(r) + a(r) * b.derivative(r); });
}

// ---------------------------------------------------------------------------

double Envelope::operator()(double r) const {
    switch (shape) {
        case EnvelopeShape::Linear: return constant * r;
        case EnvelopeShape::LogLinear: return constant * (1.0 + std::log(kE + r)) * r;
        case EnvelopeShape::Quadratic: return constant * r * (1.0 + r);
    }
    return 0.0;
}

double compute_H(const GrowthBound& h, double r, int power) {
    if (!(r > 0.0)) throw BadArgument("compute_H needs r > 0");
    if (power != 1 && power != 2) throw BadArgument("compute_H power must be 1 or 2");
    const quad::Integrand f = [&h, power](double s) {
        const double v = h(s);
        return (power == 1 ? v : v * v) / (s * s);
    };
    const quad::TailResult tail = quad::tail_integral(f, r, 1e-10);
    if (!tail.converged)
        throw DivergentIntegral("H[" + h.label() + "^" + std::to_string(power) + "](" + fmt(r) +
                                ") tail does not decay geometrically (last ratio " +
                                fmt(tail.last_ratio) + ")");
    return tail.value;
}

double compute_E(const GrowthBound& h, double r) {
    if (r < 0.0) throw BadArgument("compute_E needs r >= 0");
    if (r == 0.0) return 0.0;
    const double q = std::sqrt(r);
    const double inner = 1.0 + q * compute_H(h, q, 2);
    return inner * inner * r;
}

std::optional<Envelope> calibrate_envelope(const GrowthBound& h, EnvelopeShape shape, double r_min,
                                           double r_max) {
    constexpr int n = 200;
    Envelope unit{shape, 1.0};
    std::vector<double> ratio(n);
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) {
        grid[i] = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (n - 1));
        ratio[i] = compute_E(h, grid[i]) / unit(grid[i]);
    }
    // Compare the ratio at the top of the grid with its value one decade lower.
    const double decade = std::log10(r_max / r_min) / (n - 1);
    const int back = std::max(1, static_cast<int>(std::lround(1.0 / decade)));
    if (ratio[n - 1] > 1.01 * ratio[n - 1 - back]) return std::nullopt;

    const double c = 1.05 * *std::max_element(ratio.begin(), ratio.end());
    if (!std::isfinite(c)) return std::nullopt;
    return Envelope{shape, c};
}

Envelope select_envelope(const GrowthBound& h) {
    for (EnvelopeShape s : {EnvelopeShape::Linear, EnvelopeShape::LogLinear, EnvelopeShape::Quadratic}) {
        if (auto env = calibrate_envelope(h, s)) {
            // Independent check on a shifted grid.
            bool ok = true;
            for (int i = 0; i < 57 && ok; ++i) {
                const double r = 1.7e-6 * std::pow(1e8 / 1.7e-6, i / 56.0);
                ok = compute_E(h, r) <= (*env)(r);
            }
            if (ok) return *env;
        }
    }
    throw EnvelopeFailure("no admissible envelope for E[" + h.label() + "]");
}

EMu compute_E_and_mu(const GrowthBound& h, double r, const std::optional<Envelope>& env) {
    const Envelope e = env ? *env : select_envelope(h);
    EMu out{compute_E(h, r), e(r)};
    if (out.E > out.mu)
        throw EnvelopeFailure("E(" + fmt(r) + ") = " + fmt(out.E) + " exceeds mu = " + fmt(out.mu));
    return out;
}

// ---------------------------------------------------------------------------

TierReport validate_tier(const GrowthBound& h, int samples, double rmax, Tier target) {
    if (samples < 16) throw BadArgument("validate_tier needs samples >= 16");
    if (!(rmax > 1.0)) throw BadArgument("validate_tier needs rmax > 1");

    TierReport rep;
    const int n_uniform = samples / 2;
    const int n_log = samples - n_uniform;
    for (int i = 0; i < n_uniform; ++i) rep.grid.push_back(rmax * i / (n_uniform - 1));
    for (int i = 0; i < n_log; ++i)
        rep.grid.push_back(1e-6 * std::pow(rmax / 1e-6, static_cast<double>(i) / (n_log - 1)));
    std::sort(rep.grid.begin(), rep.grid.end());
    rep.grid.erase(std::unique(rep.grid.begin(), rep.grid.end()), rep.grid.end());

    std::vector<double> vals(rep.grid.size());
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
        vals[i] = h(rep.grid[i]);
        if (!std::isfinite(vals[i]))
            throw InvalidFunction("h(" + fmt(rep.grid[i]) + ") is not finite for " + h.label());
    }

    // (i) positivity, monotonicity, midpoint concavity, finite h'(0).
    bool pre = true;
    const auto fail = [&](std::string pred, double w, std::string detail) {
        rep.failures.push_back({std::move(pred), w, std::move(detail)});
    };
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!(vals[i] > 0.0)) {
            pre = false;
            fail("positive", rep.grid[i], "h = " + fmt(vals[i]));
            break;
        }
    }
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        const double slack = 1e-12 * std::max(std::abs(vals[i]), 1.0);
        if (vals[i + 1] < vals[i] - slack) {
            pre = false;
            fail("nondecreasing", rep.grid[i + 1], "h drops from " + fmt(vals[i]) + " to " + fmt(vals[i + 1]));
            break;
        }
    }
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        const double mid = 0.5 * (rep.grid[i] + rep.grid[i + 1]);
        const double hm = h(mid);
        if (!std::isfinite(hm)) throw InvalidFunction("h(" + fmt(mid) + ") is not finite for " + h.label());
        const double chord = 0.5 * (vals[i] + vals[i + 1]);
        if (hm < chord - 1e-12 * std::max(std::abs(chord), 1.0)) {
            pre = false;
            fail("concave", mid, "h(mid) = " + fmt(hm) + " < chord " + fmt(chord));
            break;
        }
    }
    const double d0 = h.derivative(0.0);
    if (!std::isfinite(d0)) {
        pre = false;
        fail("finite h'(0)", 0.0, "h'(0) = " + fmt(d0));
    }
    if (!pre) return rep;
    rep.tier = Tier::PreGrowth;
    if (rep.tier >= target) return rep;

    // (ii) and (iii): tails of h/s^2 and h^2/s^2.
    const auto tail = [&h](int power) {
        return quad::tail_integral(
            [&h, power](double s) {
                const double v = h(s);
                return (power == 1 ? v : v * v) / (s * s);
            },
            1.0, 1e-8);
    };
    const quad::TailResult t1 = tail(1);
    rep.tail_h = t1.value;
    if (!t1.converged) {
        fail("int_1^inf h/s^2 < inf", t1.reach, "dyadic ratio " + fmt(t1.last_ratio));
        return rep;
    }
    rep.tier = Tier::Growth;
    if (rep.tier >= target) return rep;

    const quad::TailResult t2 = tail(2);
    rep.tail_h2 = t2.value;
    if (!t2.converged) {
        fail("int_1^inf h^2/s^2 < inf", t2.reach, "dyadic ratio " + fmt(t2.last_ratio));
        return rep;
    }
    rep.tier = Tier::WellPosedness;
    if (rep.tier >= target) return rep;

    // (iv): Osgood divergence of 1/mu at infinity for the selected envelope.
    Envelope env;
    try {
        env = select_envelope(h);
    } catch (const EnvelopeFailure& e) {
        fail("envelope mu >= E", 0.0, e.what());
        return rep;
    }
    rep.envelope = env;
    const quad::TailResult osgood =
        quad::tail_integral([env](double r) { return 1.0 / env(r); }, 1.0, 1e-8);
    if (osgood.converged) {
        fail("int_1^inf dr/mu = inf", osgood.reach,
             std::string("converges to ") + fmt(osgood.value) + " for " + to_string(env.shape) + " envelope");
        return rep;
    }
    rep.tier = Tier::GlobalWellPosedness;
    return rep;
}

GrowthBound classify(const GrowthBound& h) { return h.with_tier(validate_tier(h).tier); }

// ---------------------------------------------------------------------------

double gamma_t(const GrowthBound& h, double C, double t, double a) {
    if (!(C > 0.0)) throw BadArgument("gamma_t needs C > 0");
    if (!(t >= 0.0)) throw BadArgument("gamma_t needs t >= 0");
    if (!(a >= 0.0)) throw BadArgument("gamma_t needs a >= 0");
    const double target = C * t;
    if (target == 0.0) return a;

    const quad::Integrand inv_h = [&h](double r) { return 1.0 / h(r); };
    // Panels of equal width in log(1 + r), Gauss order 16 on each.
    const auto integral = [&](double b) {
        const double la = std::log1p(a);
        const double lb = std::log1p(b);
        const int panels = std::clamp(static_cast<int>(std::ceil(8.0 * (lb - la))), 1, 100000);
        std::vector<double> breaks(panels + 1);
        for (int i = 0; i <= panels; ++i) breaks[i] = std::expm1(la + (lb - la) * i / panels);
        breaks.front() = a;
        breaks.back() = b;
        return quad::composite_gauss(inv_h, breaks, 16);
    };

    // Bracket: h(r) >= h(a) on [a, inf) gives integral(a + h(a) C t) <= C t.
    double lo = a;
    double step = h(a) * target;
    double hi = a + step;
    double f_hi = integral(hi) - target;
    while (f_hi < 0.0) {
        lo = hi;
        step *= 2.0;
        hi = a + step;
        f_hi = integral(hi) - target;
        if (!std::isfinite(hi)) throw DivergentIntegral("gamma_t bracket escaped to infinity");
    }

    // Safeguarded Newton: d/dG integral = 1 / h(G).
    double g = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = integral(g) - target;
        if (f > 0.0) hi = g; else lo = g;
        double next = g - f * h(g);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double change = std::abs(next - g);
        g = next;
        if (change <= 1e-14 * std::max(std::abs(g), 1e-300) || hi - lo <= 1e-15 * std::abs(hi)) break;
    }
    return g;
}

double F_t(const GrowthBound& h, double C, double t, double r) { return h(gamma_t(h, C, t, r)); }

double mubar(double r) {
    if (!(r >= 0.0)) throw BadArgument("mubar needs r >= 0");
    if (r == 0.0) return 0.0;
    return r <= 1.0 / kE ? -r * std::log(r) : 1.0 / kE;
}

double chi_t(double C0, double t, double r) {
    if (!(r >= 0.0) || !(t >= 0.0) || !(C0 >= 0.0)) throw BadArgument("chi_t needs r, t, C0 >= 0");
    if (r > 1.0) return r;
    return std::pow(r, std::exp(-C0 * t));
}

double phi_alpha(double C0, double t, double alpha, double x) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw BadArgument("phi_alpha needs alpha in (0, 1)");
    if (!(x >= 0.0) || !(t >= 0.0) || !(C0 >= 0.0)) throw BadArgument("phi_alpha needs x, t, C0 >= 0");
    const double e = std::exp(-C0 * t);
    return x + std::pow(x, e / (alpha + e));
}

double scaling_constant(const GrowthBound& h) {
    const double h0 = h(0.0);
    return 2.0 * (h.derivative(0.0) + h(h0) / h0);
}

// ---------------------------------------------------------------------------

ExistenceEstimate existence_time_estimate(const std::function<double(double)>& mu, double lambda0,
                                          double T) {
    if (!(lambda0 >= 0.0)) throw BadArgument("existence_time_estimate needs Lambda0 >= 0");
    if (!(T > 0.0)) throw BadArgument("existence_time_estimate needs T > 0");
    ExistenceEstimate out;
    const double scale = std::max(T, 1.0);

    if (lambda0 == 0.0) {
        // 1/mu is not integrable at 0 for convex mu with mu(0) = 0.
        out.t_max = std::numeric_limits<double>::infinity();
        out.global = true;
        out.lambda_bound = [](double) { return 0.0; };
        return out;
    }

    const quad::TailResult tail =
        quad::tail_integral([mu, scale](double s) { return 1.0 / mu(scale * s); }, lambda0, 1e-10);
    out.global = !tail.converged;
    out.t_max = out.global ? std::numeric_limits<double>::infinity() : scale * tail.value;

    const double t_max = out.t_max;
    out.lambda_bound = [mu, lambda0, scale, t_max](double t) -> double {
        if (t <= 0.0) return lambda0;
        if (t >= t_max) return std::numeric_limits<double>::infinity();
        const double target = t / scale;
        // s = lambda0 e^v keeps wide ranges well conditioned.
        const auto integrand = [&](double v) {
            const double s = lambda0 * std::exp(v);
            return s / mu(scale * s);
        };
        const auto G = [&](double v) {
            return quad::adaptive_simpson(integrand, 0.0, v, 1e-13, 1e-300, 50).value;
        };
        double lo = 0.0;
        double hi = 1.0;
        while (G(hi) < target) {
            lo = hi;
            hi *= 2.0;
            if (hi > 700.0) return std::numeric_limits<double>::infinity();
        }
        double v = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double f = G(v) - target;
            if (f > 0.0) hi = v; else lo = v;
            double next = v - f / integrand(v);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            const double change = std::abs(next - v);
            v = next;
            if (change <= 1e-15 * std::max(1.0, std::abs(v)) || hi - lo <= 1e-15) break;
        }
        return lambda0 * std::exp(v);
    };
    return out;
}

ExistenceEstimate existence_time_estimate(const GrowthBound& h, double lambda0, double C, double T) {
    if (static_cast<int>(h.tier()) < static_cast<int>(Tier::WellPosedness))
        throw TierRequired("existence_time_estimate needs a bound classified at WellPosedness or above; '" +
                           h.label() + "' is " + to_string(h.tier()));
    if (!(C > 0.0)) throw BadArgument("existence_time_estimate needs C > 0");
    const Envelope env = select_envelope(h);
    ExistenceEstimate est = existence_time_estimate([env, C](double s) { return C * env(s); }, lambda0, T);
    if (h.tier() == Tier::GlobalWellPosedness) {
        est.global = true;
        est.t_max = std::numeric_limits<double>::infinity();
    }
    return est;
}

}  // namespace growthflow
