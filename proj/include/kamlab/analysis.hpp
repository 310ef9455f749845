#pragma once

#include <span>
#include <vector>

#include "kamlab/flow.hpp"
#include "kamlab/solver.hpp"
#include "kamlab/trig_poly.hpp"

namespace kamlab::analysis {

// ---------------------------------------------------------------------------
// Generalized derivatives (n = 1)
// ---------------------------------------------------------------------------

/// Per-point one-sided difference quotients and the interval they span.
/// For semiconcave data d_minus >= d_plus up to O(dx) slack, so the interval
/// is the discrete superdifferential [d_plus, d_minus].
struct SuperdiffField {
    std::vector<double> d_plus;   // right difference quotient
    std::vector<double> d_minus;  // left difference quotient
    std::vector<double> lower, upper;
    std::vector<char> differentiable;  // |d_minus - d_plus| <= 3 dx C_scl
    double c_scl = 0.0;                // second-difference constant used for the flag
};

SuperdiffField superdifferential(const solver::GridFunction& u);

/// Upper estimate of the semiconcavity constant:
/// max over the grid of (u(x+dx) + u(x-dx) - 2u(x)) / dx^2.
double semiconcavity_constant(const solver::GridFunction& u);

// ---------------------------------------------------------------------------
// Hausdorff distance
// ---------------------------------------------------------------------------

struct Interval {
    double lo, hi;
};

/// Finite description of a compact subset of the line: points and closed
/// intervals. Distances are computed exactly from endpoints and gap midpoints.
struct Set1D {
    std::vector<double> points;
    std::vector<Interval> intervals;

    bool empty() const { return points.empty() && intervals.empty(); }
    static Set1D of_point(double x) { return {{x}, {}}; }
    static Set1D of_interval(double lo, double hi) { return {{}, {{lo, hi}}}; }
};

double hausdorff_distance(const Set1D& a, const Set1D& b);

/// Hausdorff distance between two point clouds on the cylinder (x periodic).
double hausdorff_distance_points(std::span<const double> x1, std::span<const double> p1,
                                 std::span<const double> x2, std::span<const double> p2,
                                 double period);

// ---------------------------------------------------------------------------
// Convergence-rate measurement
// ---------------------------------------------------------------------------

struct ErrorCurves {
    std::vector<double> times;
    std::vector<double> c0;      // sup |U(., t) - u_ref|
    std::vector<double> w1inf;   // c0 + sup_x max_{p in D+} |p - d u_ref|
};

/// Error curves of evolution snapshots against a differentiable reference
/// (d u_ref is its centered difference). Grids must match.
ErrorCurves error_curves(const std::vector<double>& times,
                         const std::vector<solver::GridFunction>& snapshots,
                         const solver::GridFunction& u_ref);

struct RateFit {
    double log_intercept = 0.0;  // log C
    double rate = 0.0;           // decay exponent (positive = decaying)
    double r_squared = 0.0;
    double floor_time = 0.0;     // +inf when the curve never flattens
    int used_samples = 0;
};

/**
 * Least-squares fit of log e(t) = log C - rate * t over the pre-floor window.
 * floor_time is the first sample after which the log-error changes by less
 * than 1% over a full unit of time. Needs at least 5 samples above the floor
 * and strictly positive errors; an all-floor curve raises DomainError.
 */
RateFit fit_rate(const std::vector<double>& times, const std::vector<double>& errors);

// ---------------------------------------------------------------------------
// Invariant-graph verification
// ---------------------------------------------------------------------------

/// Mean of P over the cycle, (1/period) * oint P dx, trapezoid rule.
/// Invariant graphs of the damped flow are exact: the constant vanishes.
double exactness_constant(const model::TrigPoly& p, int samples = 1024);
double exactness_constant(const solver::GridFunction& p);
double exactness_constant(std::span<const double> samples);

/// sup_x | -H_x(x, P) - lambda P - P'(x) H_p(x, P) |, the defect of the
/// graph-invariance identity.
double kam_invariance_residual(const flow::DampedSystem& sys, const model::TrigPoly& p,
                               int samples = 2048);
double kam_invariance_residual(const flow::DampedSystem& sys, const solver::GridFunction& p);

// ---------------------------------------------------------------------------
// Stationary residual, calibration and domination
// ---------------------------------------------------------------------------

struct ResidualReport {
    double stationary_residual = 0.0;   // sup |lambda u + H(x, du)| at differentiable points
    int differentiable_points = 0;
    bool curve_checked = false;
    double calibration_defect = 0.0;    // |e^{lt}u(g(t)) - e^{ls}u(g(s)) - discounted action|
    double l_integral = 0.0;            // discounted integral of the substitute Lagrangian
    int domination_samples = 0;
    int domination_violations = 0;
    double domination_min_margin = 0.0;
};

ResidualReport residual_checks(const solver::GridFunction& u, const flow::DampedSystem& sys,
                               const solver::CharacteristicCurve* curve = nullptr,
                               int domination_samples = 50, unsigned seed = 20240811u);

/// Substitute Lagrangian probe around a stationary reference:
///   l(x, w) = L(x, w) - lambda u(x) - w du(x),
///   F(x, w) = l(x, w) + H(x, du(x)) + lambda u(x)  (>= 0 by Fenchel).
class SubstituteLagrangianProbe {
  public:
    SubstituteLagrangianProbe(solver::GridFunction u_minus, const flow::DampedSystem& sys);

    double l(double x, double w) const;
    double f(double x, double w) const;
    /// Velocity with F(x, .) = 0: H_p(x, du(x)).
    double optimal_velocity(double x) const;
    /// Discounted integral of l along an extracted backward curve.
    double discounted_l_integral(const solver::CharacteristicCurve& curve) const;

    const solver::GridFunction& reference() const { return u_; }

  private:
    solver::GridFunction u_;
    solver::GridFunction du_;  // centered differences on the same grid
    flow::DampedSystem sys_;
};

}  // namespace kamlab::analysis
