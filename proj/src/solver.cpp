#include "kamlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kamlab/parallel.hpp"

namespace kamlab::solver {

namespace {

constexpr double kInvPhi = 0.61803398874989484820;

// One-step Lagrangian evaluator; closed form for mechanical Hamiltonians,
// numeric Fenchel conjugate otherwise.
struct LagEval {
    const model::MechanicalHamiltonian* mech;
    const model::Hamiltonian* generic;

    explicit LagEval(const flow::DampedSystem& sys)
        : mech(sys.mechanical()), generic(sys.hamiltonian.get()) {}

    double operator()(double x, double v) const {
        if (mech) return mech->lagrangian(x, v);
        return model::legendre_transform(*generic, {wrap(x, generic->period())}, {v}).value;
    }
};

struct Candidate {
    double value = std::numeric_limits<double>::infinity();
    double foot = 0.0;
    double abs_v = std::numeric_limits<double>::infinity();

    // ties prefer the smaller |velocity|, then the lexicographically smaller y
    void offer(double value_, double foot_, double abs_v_) {
        if (value_ < value || (value_ == value && (abs_v_ < abs_v || (abs_v_ == abs_v && foot_ < foot)))) {
            value = value_;
            foot = foot_;
            abs_v = abs_v_;
        }
    }
};

}  // namespace

void SolverParams::validate(const PeriodicGrid& grid) const {
    if (dt <= 0.0) throw ConfigError("SolverParams: dt must be positive");
    if (v_max <= 0.0) throw ConfigError("SolverParams: v_max must be positive");
    if (candidates < 5) throw ConfigError("SolverParams: need at least 5 candidates");
    if (refine_tol <= 0.0) throw ConfigError("SolverParams: refine_tol must be positive");
    if (interp != "linear") throw ConfigError("SolverParams: only linear interpolation is supported");
    if (v_max * dt < 2.0 * grid.dx())
        throw ConfigError("SolverParams: stencil too narrow, need v_max * dt >= 2 dx (= " +
                          std::to_string(2.0 * grid.dx()) + ")");
    if (v_max * dt > 0.5 * grid.period)
        throw ConfigError("SolverParams: search window exceeds half the period");
}

ArgminResult lo_argmin(const GridFunction& u, const flow::DampedSystem& sys, const SolverParams& params,
                       double x) {
    const LagEval lag(sys);
    const double dt = params.dt;
    const double radius = params.v_max * dt;
    const double q = std::exp(-sys.lambda * dt);
    const double w = sys.lambda > 0.0 ? -std::expm1(-sys.lambda * dt) / sys.lambda : dt;
    const double inv_dt = 1.0 / dt;

    auto objective = [&](double y) {
        const double v = (x - y) * inv_dt;
        return q * u.interp(y) + w * lag(0.5 * (x + y), v);
    };

    const int m = params.candidates;
    const double spacing = 2.0 * radius / (m - 1);
    Candidate best;
    int best_index = -1;
    for (int j = 0; j < m; ++j) {
        const double y = x - radius + spacing * j;
        best.offer(objective(y), y, std::abs((x - y) * inv_dt));
        if (best.foot == y) best_index = j;
    }
    // The zero-velocity curve is always probed, whatever the candidate count.
    best.offer(objective(x), x, 0.0);

    // golden-section refinement inside the winning coarse bracket
    if (best_index >= 0) {
        double a = x - radius + spacing * std::max(0, best_index - 1);
        double b = x - radius + spacing * std::min(m - 1, best_index + 1);
        double x1 = b - kInvPhi * (b - a);
        double x2 = a + kInvPhi * (b - a);
        double f1 = objective(x1);
        double f2 = objective(x2);
        best.offer(f1, x1, std::abs((x - x1) * inv_dt));
        best.offer(f2, x2, std::abs((x - x2) * inv_dt));
        while (b - a > params.refine_tol) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - kInvPhi * (b - a);
                f1 = objective(x1);
                best.offer(f1, x1, std::abs((x - x1) * inv_dt));
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + kInvPhi * (b - a);
                f2 = objective(x2);
                best.offer(f2, x2, std::abs((x - x2) * inv_dt));
            }
        }
    }

    ArgminResult out;
    out.value = best.value;
    out.foot = best.foot;
    out.velocity = (x - best.foot) * inv_dt;
    out.boundary = radius - std::abs(best.foot - x) <= 2.0 * params.refine_tol;
    return out;
}

GridFunction lo_step(const GridFunction& u, const flow::DampedSystem& sys, const SolverParams& params,
                     BoundaryPolicy policy, StepReport* report, int threads) {
    params.validate(u.grid());
    GridFunction out(u.grid());
    const int n = u.size();
    std::vector<char> boundary(n, 0);

    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const ArgminResult r = lo_argmin(u, sys, params, u.grid().node(static_cast<int>(i)));
            out[static_cast<int>(i)] = r.value;
            boundary[i] = r.boundary ? 1 : 0;
        }
    });

    for (int i = 0; i < n; ++i)
        if (boundary[i]) {
            if (report) {
                report->boundary_active = true;
                report->boundary_index = i;
            }
            if (policy == BoundaryPolicy::Throw) throw VelocityBoundError(i, u.grid().node(i));
            break;
        }
    return out;
}

EvolveResult evolve(const GridFunction& psi, const flow::DampedSystem& sys, double t,
                    const SolverParams& params, const std::vector<double>& snapshot_times,
                    BoundaryPolicy policy, int threads) {
    if (t < 0.0) throw DomainError("evolve: t must be nonnegative");
    const long steps = std::lround(t / params.dt);

    std::vector<long> snap_steps(snapshot_times.size());
    for (std::size_t j = 0; j < snapshot_times.size(); ++j) {
        long k = std::lround(snapshot_times[j] / params.dt);
        snap_steps[j] = std::clamp<long>(k, 0, steps);
    }

    EvolveResult res;
    res.final = psi;
    auto maybe_snapshot = [&](long k) {
        for (std::size_t j = 0; j < snap_steps.size(); ++j)
            if (snap_steps[j] == k) {
                res.snapshot_times.push_back(k * params.dt);
                res.snapshots.push_back(res.final);
            }
    };
    maybe_snapshot(0);
    for (long k = 1; k <= steps; ++k) {
        res.final = lo_step(res.final, sys, params, policy, nullptr, threads);
        maybe_snapshot(k);
    }
    return res;
}

GridFunction stationary(const flow::DampedSystem& sys, const PeriodicGrid& grid,
                        const SolverParams& params, double tol, long max_iterations,
                        StationaryReport* report, int threads, const GridFunction* warm_start) {
    if (tol <= 0.0) throw DomainError("stationary: tol must be positive");
    const double q = std::exp(-sys.lambda * params.dt);
    const double threshold = tol * (1.0 - q);
    GridFunction u(grid, 0.0);
    if (warm_start) {
        if (warm_start->grid() == grid) {
            u = *warm_start;
        } else {
            for (int i = 0; i < grid.size(); ++i) u[i] = warm_start->interp(grid.node(i));
        }
        u.require_finite("stationary warm start");
    }
    double change = std::numeric_limits<double>::infinity();
    long it = 0;
    while (change > threshold) {
        if (++it > max_iterations)
            throw ConvergenceError("stationary: iteration cap exceeded", change);
        GridFunction next = lo_step(u, sys, params, BoundaryPolicy::Throw, nullptr, threads);
        change = next.sup_diff(u);
        u = std::move(next);
    }
    if (report) {
        report->iterations = it;
        report->last_change = change;
    }
    return u;
}

KernelResult finite_horizon_kernel(const flow::DampedSystem& sys, const PeriodicGrid& grid,
                                   int seed_index, double t, const SolverParams& params, int threads) {
    if (seed_index < 0 || seed_index >= grid.size())
        throw DomainError("finite_horizon_kernel: seed index out of range");
    GridFunction seed(grid, kBigSentinel);
    seed[seed_index] = 0.0;
    EvolveResult evo = evolve(seed, sys, t, params, {}, BoundaryPolicy::Flag, threads);

    KernelResult out{std::move(evo.final), std::vector<char>(grid.size(), 1), 0};
    const double discounted_sentinel = 0.5 * std::exp(-sys.lambda * t) * kBigSentinel;
    for (int i = 0; i < grid.size(); ++i)
        if (out.values[i] >= discounted_sentinel) {
            out.reachable[i] = 0;
            ++out.unreachable_count;
        }
    return out;
}

CharacteristicCurve backward_characteristic(const GridFunction& u, const flow::DampedSystem& sys,
                                            double x, double horizon, const SolverParams& params) {
    params.validate(u.grid());
    u.require_finite("backward_characteristic");
    const long steps = std::max<long>(1, std::lround(horizon / params.dt));
    const LagEval lag(sys);

    CharacteristicCurve curve;
    curve.dt = params.dt;
    curve.times.reserve(steps + 1);
    curve.positions.reserve(steps + 1);
    curve.times.push_back(0.0);
    curve.positions.push_back(x);

    double current = x;
    for (long k = 0; k < steps; ++k) {
        const ArgminResult r = lo_argmin(u, sys, params, current);
        if (r.boundary)
            throw VelocityBoundError(-1, wrap(current, u.grid().period));
        const double tau_mid = -(static_cast<double>(k) + 0.5) * params.dt;
        curve.velocities.push_back(r.velocity);
        curve.action.push_back(std::exp(sys.lambda * tau_mid) *
                               lag(0.5 * (current + r.foot), r.velocity));
        current = r.foot;
        curve.times.push_back(-(k + 1) * params.dt);
        curve.positions.push_back(current);
    }
    return curve;
}

}  // namespace kamlab::solver
