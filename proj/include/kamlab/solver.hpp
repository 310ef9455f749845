#pragma once

#include <optional>
#include <vector>

#include "kamlab/flow.hpp"
#include "kamlab/grid.hpp"

namespace kamlab::solver {

/// Sentinel used only while seeding the finite-horizon kernel.
inline constexpr double kBigSentinel = 1e9;

enum class BoundaryPolicy { Throw, Flag };

struct SolverParams {
    double dt = 1e-2;
    double v_max = 6.0;       // velocity search radius
    int candidates = 25;      // coarse enumeration count (kept odd so v = 0 is probed)
    double refine_tol = 1e-8; // golden-section interval tolerance on the endpoint
    std::string interp = "linear";

    /// Checks dt > 0, candidates >= 5, interp == "linear" and the stencil
    /// condition v_max * dt >= 2 dx (the search window must reach beyond the
    /// nearest grid neighbours).
    void validate(const PeriodicGrid& grid) const;
};

struct StepReport {
    bool boundary_active = false;
    long boundary_index = -1;
};

struct ArgminResult {
    double value = 0.0;
    double foot = 0.0;      // endpoint y of the optimal one-step curve
    double velocity = 0.0;  // (x - y) / dt
    bool boundary = false;  // argmin pressed against |y - x| = v_max dt
};

/**
 * One-step variational minimum at an arbitrary point:
 *
 *   min_{|y - x| <= v_max dt}  e^{-lambda dt} I[u](y) + w(dt) L((x+y)/2, (x-y)/dt),
 *
 * with w(dt) = (1 - e^{-lambda dt}) / lambda (exact discount weight) and I the
 * periodic linear interpolant. Minimization enumerates `candidates` equally
 * spaced endpoints and refines the winning bracket by golden-section search;
 * ties prefer the smaller |velocity|, then the smaller y.
 */
ArgminResult lo_argmin(const GridFunction& u, const flow::DampedSystem& sys, const SolverParams& params,
                       double x);

/// One discrete Lax-Oleinik step over params.dt applied at every grid node.
/// A boundary-active argmin raises VelocityBoundError under BoundaryPolicy::Throw.
GridFunction lo_step(const GridFunction& u, const flow::DampedSystem& sys, const SolverParams& params,
                     BoundaryPolicy policy = BoundaryPolicy::Throw, StepReport* report = nullptr,
                     int threads = 0);

struct EvolveResult {
    GridFunction final;
    std::vector<double> snapshot_times;       // actual times (multiples of dt)
    std::vector<GridFunction> snapshots;
};

/// k-fold composition of lo_step with t = k dt (t is rounded to the nearest
/// multiple). Snapshots are recorded at the requested times.
EvolveResult evolve(const GridFunction& psi, const flow::DampedSystem& sys, double t,
                    const SolverParams& params, const std::vector<double>& snapshot_times = {},
                    BoundaryPolicy policy = BoundaryPolicy::Throw, int threads = 0);

struct StationaryReport {
    long iterations = 0;
    double last_change = 0.0;
};

/**
 * Discounted fixed point: iterates lo_step from u = 0 until the sup-change is
 * at most tol * (1 - e^{-lambda dt}). The discrete operator contracts the sup
 * norm by exactly e^{-lambda dt}, so the returned function is within tol of
 * the discrete fixed point — which is also independent of the optional warm
 * start. Exceeding max_iterations raises ConvergenceError.
 */
GridFunction stationary(const flow::DampedSystem& sys, const PeriodicGrid& grid,
                        const SolverParams& params, double tol = 1e-5, long max_iterations = 1000000,
                        StationaryReport* report = nullptr, int threads = 0,
                        const GridFunction* warm_start = nullptr);

struct KernelResult {
    GridFunction values;
    std::vector<char> reachable;
    int unreachable_count = 0;
};

/// Finite-horizon cost h^t(y, .) from grid node seed_index, computed by
/// evolving the sentinel seed (0 at y, kBigSentinel elsewhere). Points whose
/// value still carries the discounted sentinel are flagged unreachable.
KernelResult finite_horizon_kernel(const flow::DampedSystem& sys, const PeriodicGrid& grid,
                                   int seed_index, double t, const SolverParams& params,
                                   int threads = 0);

/// Backward minimizing curve extracted from a converged stationary solution.
struct CharacteristicCurve {
    std::vector<double> times;      // 0, -dt, ..., -T
    std::vector<double> positions;  // lifted (continuous, no wrap jumps)
    std::vector<double> velocities; // velocities[k] moves positions[k+1] -> positions[k]
    std::vector<double> action;     // e^{lambda tau_mid} L(midpoint, velocity) per segment
    double dt = 0.0;

    double duration() const { return times.empty() ? 0.0 : -times.back(); }
};

/// Repeatedly selects the one-step argmin endpoint backward from x. The input
/// u must be a stationary fixed point to tolerance.
CharacteristicCurve backward_characteristic(const GridFunction& u, const flow::DampedSystem& sys,
                                            double x, double horizon, const SolverParams& params);

}  // namespace kamlab::solver
