#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "growthflow/fields.hpp"
#include "growthflow/growth_bounds.hpp"
#include "growthflow/vec2.hpp"

namespace growthflow {

struct PairSetup {
    VortexParticleField field1;
    VortexParticleField field2;
    GrowthBound zeta = constant_bound();
    GrowthBound h = constant_bound();
    double T = 1.0;
    double dt = 0.01;
    /// Fixed probes for Q and J. They are also advected as tracers; a ring
    /// of `ring_points` at `ring_factor` times the support radius is added.
    std::vector<Vec2> probes;
    double ring_factor = 3.0;
    int ring_points = 32;
};

/// Weighted distances between two solutions on a shared time grid.
struct StabilityReport {
    std::vector<double> times;
    std::vector<double> eta;
    std::vector<double> L;       ///< at the step times
    std::vector<double> M;       ///< RK4-weighted integral of the stage values of L
    std::vector<double> Q;
    std::vector<double> J_norm;  ///< max |J| / zeta over the probes
    std::vector<double> J1_norm; ///< max |J_1| / zeta over the probes
    double du0 = 0.0;            ///< ||(u1^0 - u2^0) / zeta||_inf over the probes
    double domega0 = 0.0;        ///< ||omega1^0 - omega2^0||_inf
    double s_zeta_norm = 0.0;    ///< du0 + domega0
    double aT = 0.0;             ///< du0 + max_t J_norm
    double C0 = 0.0;             ///< sup_t ||u1||_{S_h} at the tracked points
    double T = 0.0;
    bool h_is_one = false;
    std::string zeta_label;
    std::string h_label;

    /// a(t) = du0 + max_{s <= t} J_norm(s).
    std::vector<double> aT_series() const;
};

/// Throws HypothesisViolation unless zeta >= h on samples, h is at least
/// WellPosedness, and zeta/h and zeta*h are at least Growth.
void check_pair_hypotheses(const GrowthBound& zeta, const GrowthBound& h);

/// Advects both solutions with every tracked point (both particle sets and
/// the probes) in each system. L is taken at every RK4 stage and M is
/// accumulated with the RK4 weights, so eta <= M holds step by step.
StabilityReport run_pair(const PairSetup& setup);

struct EnvelopeFit {
    double C = 0.0;
    bool pass = false;
    double margin = 0.0;        ///< min over samples of envelope - value
    std::size_t samples = 0;    ///< samples that constrained the fit
};

/// Smallest C with M(t) <= (t aT)^{exp(-C t)} over samples with t aT < 1 and
/// M(t) < exp(-1).
EnvelopeFit fit_small_data(std::span<const StabilityReport> reports, double C_max = 1e3);
bool small_data_holds(const StabilityReport& r, double C);

/// Smallest C with Q(t) <= (aT + C mubar(C M(t))) exp(C t).
EnvelopeFit q_envelope_check(const StabilityReport& r, double C_max = 1e3);
EnvelopeFit q_envelope_check(std::span<const StabilityReport> reports, double C_max = 1e3);
/// Checks the Q envelope with a given C.
EnvelopeFit q_envelope_check_with(const StabilityReport& r, double C);

/// Largest M(t) / (t aT) over samples with t aT > 0.
double fit_large_data(std::span<const StabilityReport> reports);

/// aT / ||u1^0 - u2^0||_{S_zeta}; 0 when both vanish.
double aT_simple_ratio(const StabilityReport& r);

struct PhiAlphaCheck {
    double aT_star = 0.0;
    double phi = 0.0;
    double ratio = 0.0;  ///< aT_star / phi, the C1 this report needs
    double t_star_limit = 0.0;
};

/// a(T*) against Phi_alpha(T, C ||(u1^0 - u2^0)/zeta||^delta). Throws
/// HypothesisViolation unless h == 1, 0 < delta < alpha < 1 and
/// T* < min(T, (1 + delta) / (C C0)).
PhiAlphaCheck phi_alpha_bound_check(const StabilityReport& r, double alpha, double delta, double T_star,
                                    double C = 1.0);

/// Window end points k T / N for the smallest N with T / N <= T_star_max.
std::vector<double> chain_windows(double T, double T_star_max);

/// Largest |f(p) - g(p)| over `points` and a quasi-random set of `count`
/// points in the square [-extent, extent]^2.
double sup_difference(const std::function<double(Vec2)>& f, const std::function<double(Vec2)>& g,
                      std::span<const Vec2> points, double extent, std::size_t count = 1u << 18);

}  // namespace growthflow
