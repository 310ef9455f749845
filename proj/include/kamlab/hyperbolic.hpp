#pragma once

#include <array>
#include <vector>

#include "kamlab/flow.hpp"
#include "kamlab/trig_poly.hpp"

namespace kamlab::hyperbolic {

/**
 * Sampling of an invariant graph torus K(theta) = (theta, eta(theta)) on a
 * uniform theta grid (the phase is the x coordinate itself; no conjugacy
 * coordinate is constructed). omega is the rotation number of the induced
 * circle dynamics.
 */
struct TorusSampling {
    std::vector<double> theta;
    std::vector<double> eta;        // graph values
    std::vector<double> eta_prime;  // graph slope samples
    double omega = 0.0;
    double period = kTwoPi;

    int size() const { return static_cast<int>(theta.size()); }
};

/// Samples a TrigPoly graph and computes its rotation number.
TorusSampling sample_torus(const flow::DampedSystem& sys, const model::TrigPoly& graph, int n_theta = 256);

struct MonodromySample {
    double theta = 0.0;
    double landing_x = 0.0;  // time-1 image of theta under the graph dynamics (lifted)
    double landing_p = 0.0;
    std::array<double, 4> dphi{};  // row-major 2x2 tangent map
    double det = 0.0;
    double transport_residual = 0.0;  // direction defect of DPhi * DK against DK(landing)
};

struct MonodromyResult {
    std::vector<MonodromySample> samples;
    double transport_residual_sup = 0.0;
    double det_rel_err_sup = 0.0;  // against e^{-lambda}
};

/**
 * Time-1 tangent maps along the torus. The tangent direction DK(theta) must
 * be carried onto the tangent direction at the landing point; the residual is
 * the sine of the angle between DPhi DK(theta) and DK(g(theta)). A residual
 * above `invariance_threshold` raises DomainError ("torus not invariant
 * enough").
 */
MonodromyResult time1_monodromy(const flow::DampedSystem& sys, const TorusSampling& torus,
                                const flow::StepSpec& spec = {}, double invariance_threshold = 1e-2);

/**
 * Solves  -e^{-lambda} B(theta + omega) + S(theta) + B(theta) = 0  on a
 * uniform grid (size must be a power of two) both spectrally,
 *
 *   B_k = -S_k / (1 - e^{-lambda} e^{i k omega 2 pi / period}),
 *
 * and by the fixed-point iteration B <- e^{-lambda} B o rho_omega - S with a
 * spectral shift, iterated to sup-change <= 1e-12. The two solutions must
 * agree to 1e-10 (ConsistencyError otherwise). lambda > 0 keeps every
 * denominator away from zero, so there is no small-divisor obstruction.
 */
std::vector<double> solve_cohomological(const std::vector<double>& s_samples, double lambda,
                                        double omega, double period = kTwoPi);

/**
 * Invariant splitting along the torus. Frames are M(theta) = (DK | V) with
 * V = J^T DK / |DK|^2; the time-1 map acts as
 *
 *   DPhi [DK | V](theta) = [DK | V](g(theta)) [[c, s], [rho, a]],
 *
 * with c = g'(theta), rho ~ 0, and the stable direction is
 * E^s = DK * B + V where B solves the transported cohomological equation
 *   a(theta) B(g(theta)) - c(theta) B(theta) = s(theta),
 * found here by fixed-point iteration (no conjugacy needed).
 */
struct SplittingData {
    TorusSampling torus;
    MonodromyResult monodromy;
    std::vector<double> landing;      // g(theta_i), lifted
    std::vector<double> gprime;       // c(theta)
    std::vector<double> shear;        // s(theta)
    std::vector<double> stable_mult;  // a(theta), = e^{-lambda} / g'(theta) up to scheme error
    std::vector<double> bcoef;        // B(theta)
    std::vector<std::array<double, 2>> dk, vdir, es;  // es normalized
    double frame_det_min = 0.0;       // min |det M(theta)|
    double ec_residual = 0.0;
    double es_residual = 0.0;
};

SplittingData build_splitting(const flow::DampedSystem& sys, const TorusSampling& torus,
                              const flow::StepSpec& spec = {});

/// E^s invariance defect, sup_theta of the component of DPhi e^s(theta)
/// orthogonal to e^s(g(theta)) (sections normalized). Accepts an explicit B
/// so corrupted inputs are detectable. lambda <= 0 is rejected.
double splitting_residual(const flow::DampedSystem& sys, const SplittingData& data,
                          const std::vector<double>& bcoef);

struct EnsembleSpec {
    double delta0 = 1e-4;  // initial normal offset from the torus
    int count = 64;
    double horizon = 16.0;
    flow::StepSpec step;
    double sample_dt = 0.25;
    double noise_floor = 1e-12;

    // RK4 keeps the integrator's own invariant-circle offset (~dt^4) far below
    // the distances being fitted; the order-2 splitting would floor the curve
    // mid-window at delta0 = 1e-4.
    EnsembleSpec() { step.method = flow::Method::RK4; }
};

struct ExponentReport {
    double exponent = 0.0;
    double r_squared = 0.0;
    bool on_torus = false;   // ensemble never left the 1e-8 neighbourhood
    bool escaped = false;    // distance grew: positive exponent, with a warning
    std::vector<double> times, dists;
};

/// Transverse Lyapunov exponent: log-distance decay of an ensemble offset
/// normally from the torus by delta0, fitted before the noise floor.
ExponentReport transverse_exponent(const flow::DampedSystem& sys, const TorusSampling& torus,
                                   const EnsembleSpec& spec = {});

}  // namespace kamlab::hyperbolic
