#pragma once

// Growth bounds h: [0, inf) -> (0, inf) that control how fast a velocity
// field may grow at spatial infinity, together with the scalar functions
// derived from them (H, E, mu, Gamma_t, F_t, mubar, chi_t, Phi_alpha).

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace growthflow {

/// Tiers of the growth-bound hierarchy, ordered from weakest to strongest.
enum class Tier {
    Unclassified = 0,
    PreGrowth = 1,
    Growth = 2,
    WellPosedness = 3,
    GlobalWellPosedness = 4,
};

const char* to_string(Tier t);

/// A positive, nondecreasing, concave scalar function with access to its
/// first derivative. Immutable; cheap to copy.
class GrowthBound {
  public:
    using Fn = std::function<double(double)>;

    /// `deriv` may be empty, in which case derivative() falls back to a
    /// one-sided difference with step 1e-6.
    GrowthBound(std::string label, Fn eval, Fn deriv = {});

    double operator()(double r) const { return eval_(r); }
    double derivative(double r) const;
    bool has_analytic_derivative() const { return static_cast<bool>(deriv_); }

    const std::string& label() const { return label_; }
    Tier tier() const { return tier_; }

    /// Copy carrying a classification (normally from validate_tier).
    GrowthBound with_tier(Tier t) const;

    /// r -> h(r)^2 with derivative 2 h h'.
    GrowthBound squared() const;

  private:
    std::string label_;
    Fn eval_;
    Fn deriv_;
    Tier tier_ = Tier::Unclassified;
};

/// h == c.
GrowthBound constant_bound(double c = 1.0);
/// h1(r) = (1 + r)^alpha.
GrowthBound power_bound(double alpha);
/// h2(r) = log^{1/4}(e + r).
GrowthBound quarterlog_bound();
/// h(r) = 1 + r; only a pre-growth bound.
GrowthBound linear_bound();

/// Parses a built-in identifier: "const", "const:<c>", "power:<alpha>",
/// "quarterlog", "linear". Throws BadArgument otherwise.
GrowthBound bound_from_id(const std::string& id);

/// zeta / h and zeta * h, used for the stability hypotheses.
GrowthBound quotient_bound(const GrowthBound& num, const GrowthBound& den);
GrowthBound product_bound(const GrowthBound& a, const GrowthBound& b);

// ---------------------------------------------------------------------------
// Convex envelopes mu >= E.

enum class EnvelopeShape {
    Linear,     ///< C r
    LogLinear,  ///< C (1 + log(e + r)) r
    Quadratic,  ///< C r (1 + r)
};

const char* to_string(EnvelopeShape s);

struct Envelope {
    EnvelopeShape shape = EnvelopeShape::Quadratic;
    double constant = 1.0;

    double operator()(double r) const;
};

/// Calibrates the constant of `shape` against E on a 200-point log grid
/// (1.05 times the largest ratio). Returns nullopt if E/shape is still
/// growing over the last decade of the grid, i.e. the shape is too weak.
std::optional<Envelope> calibrate_envelope(const GrowthBound& h, EnvelopeShape shape,
                                           double r_min = 1e-6, double r_max = 1e8);

/// Tightest admissible envelope among Linear, LogLinear and Quadratic.
/// Throws EnvelopeFailure if none of them dominates E on the grid.
Envelope select_envelope(const GrowthBound& h);

// ---------------------------------------------------------------------------
// Tier classification.

struct Diagnostic {
    std::string predicate;
    double witness = 0.0;  ///< sample radius (or tail reach) that failed
    std::string detail;
};

struct TierReport {
    Tier tier = Tier::Unclassified;
    std::vector<double> grid;  ///< radii used for the pointwise checks
    std::vector<Diagnostic> failures;
    std::optional<Envelope> envelope;  ///< set when WellPosedness was reached
    double tail_h = std::numeric_limits<double>::quiet_NaN();   ///< int_1^inf h/s^2
    double tail_h2 = std::numeric_limits<double>::quiet_NaN();  ///< int_1^inf h^2/s^2
};

/// Highest tier whose conditions pass on a sampling grid of `samples`
/// points in [0, rmax] (half uniform, half logarithmic). Classification
/// stops early once `target` is reached.
TierReport validate_tier(const GrowthBound& h, int samples = 256, double rmax = 1e4,
                         Tier target = Tier::GlobalWellPosedness);

/// h.with_tier(validate_tier(h).tier).
GrowthBound classify(const GrowthBound& h);

// ---------------------------------------------------------------------------
// Derived scalars.

/// H[h^power](r) = int_r^inf h(s)^power / s^2 ds. Throws DivergentIntegral.
double compute_H(const GrowthBound& h, double r, int power = 1);

struct EMu {
    double E = 0.0;
    double mu = 0.0;
};

/// E(r) = (1 + r^{1/2} H[h^2](r^{1/2}))^2 r and the envelope value mu(r).
/// The envelope is selected with select_envelope unless one is supplied.
EMu compute_E_and_mu(const GrowthBound& h, double r, const std::optional<Envelope>& env = {});
double compute_E(const GrowthBound& h, double r);

/// Gamma with int_a^Gamma dr / h(r) = C t, relative tolerance 1e-10.
double gamma_t(const GrowthBound& h, double C, double t, double a);

/// F_t(r) = h(Gamma_t(r)).
double F_t(const GrowthBound& h, double C, double t, double r);

/// -r log r for r <= 1/e, 1/e above.
double mubar(double r);

/// r^{exp(-C0 t)} for r <= 1, r above.
double chi_t(double C0, double t, double r);

/// x + x^{exp(-C0 t) / (alpha + exp(-C0 t))}.
double phi_alpha(double C0, double t, double alpha, double x);

/// Scaling constant C(h) = 2 (h'(0) + h(h(0)) / h(0)).
double scaling_constant(const GrowthBound& h);

// ---------------------------------------------------------------------------
// Existence-time estimate from Lambda(t) <= Lambda0 + mu(int_0^t Lambda).

struct ExistenceEstimate {
    /// Time at which the Osgood bound blows up; +inf when it never does.
    double t_max = std::numeric_limits<double>::infinity();
    bool global = false;
    /// Bound on Lambda(t); +inf for t >= t_max.
    std::function<double(double)> lambda_bound;
};

/// Inverts int_{Lambda0}^{Lambda} ds / mu(T' s) = t / T' with T' = max(T, 1).
ExistenceEstimate existence_time_estimate(const std::function<double(double)>& mu,
                                          double lambda0, double T);

/// Same, with mu = C * (selected envelope of h). Needs h.tier() >=
/// WellPosedness; the GlobalWellPosedness tier reports t_max = inf.
ExistenceEstimate existence_time_estimate(const GrowthBound& h, double lambda0, double C, double T);

}  // namespace growthflow
