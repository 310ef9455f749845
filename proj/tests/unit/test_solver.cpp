#include <doctest.h>

#include <cmath>
#include <random>

#include "kamlab/registry.hpp"
#include "kamlab/solver.hpp"
#include "support/dp_oracle.hpp"

using namespace kamlab;
using flow::DampedSystem;
using solver::BoundaryPolicy;
using solver::GridFunction;
using solver::PeriodicGrid;
using solver::SolverParams;

namespace {

SolverParams coarse_params() {
    SolverParams p;
    p.dt = 0.025;
    p.v_max = 8.0;
    return p;
}

GridFunction random_trig(const PeriodicGrid& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double a0 = unif(rng), a1 = unif(rng), b1 = unif(rng), a2 = unif(rng), b2 = unif(rng);
    return GridFunction::sample(grid, [&](double x) {
        return a0 + a1 * std::cos(x) + b1 * std::sin(x) + 0.5 * (a2 * std::cos(2 * x) + b2 * std::sin(2 * x));
    });
}

}  // namespace

TEST_CASE("parameter validation") {
    PeriodicGrid grid(64);
    SolverParams p = coarse_params();
    CHECK_NOTHROW(p.validate(grid));

    SolverParams narrow = p;
    narrow.dt = 1e-3;  // 8e-3 < 2 dx = 0.196
    CHECK_THROWS_AS(narrow.validate(grid), ConfigError);

    SolverParams bad = p;
    bad.interp = "cubic";
    CHECK_THROWS_AS(bad.validate(grid), ConfigError);

    CHECK_THROWS_AS(PeriodicGrid(8), ConfigError);
}

TEST_CASE("one step from a constant on the pendulum") {
    const DampedSystem sys(model::make_pendulum(), kExampleLambda);
    PeriodicGrid grid(64);
    const auto p = coarse_params();
    GridFunction one(grid, 1.0);
    const auto stepped = solver::lo_step(one, sys, p);
    // the resting curve at the potential minimum is optimal: value e^{-lambda dt}
    CHECK(std::abs(stepped[0] - std::exp(-kExampleLambda * p.dt)) <= 1e-10);
}

TEST_CASE("constant shift passes through the step") {
    const DampedSystem sys(model::make_fig1(), kExampleLambda);
    PeriodicGrid grid(64);
    const auto p = coarse_params();
    std::mt19937_64 rng(5);
    const auto u = random_trig(grid, rng);
    const double c = 0.37;
    GridFunction uc = u;
    for (int i = 0; i < grid.size(); ++i) uc[i] += c;
    const auto a = solver::lo_step(u, sys, p);
    const auto b = solver::lo_step(uc, sys, p);
    const double q = std::exp(-kExampleLambda * p.dt);
    for (int i = 0; i < grid.size(); ++i) CHECK(std::abs(b[i] - a[i] - q * c) <= 1e-12);
}

TEST_CASE("monotonicity of the step") {
    const DampedSystem sys(model::make_fig1(), kExampleLambda);
    PeriodicGrid grid(64);
    const auto p = coarse_params();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto psi = random_trig(grid, rng);
        GridFunction phi = psi;
        for (int i = 0; i < grid.size(); ++i) phi[i] += 0.05 + unif(rng);
        const auto a = solver::lo_step(psi, sys, p);
        const auto b = solver::lo_step(phi, sys, p);
        for (int i = 0; i < grid.size(); ++i) CHECK(a[i] <= b[i]);
    }
}

TEST_CASE("the step contracts the sup norm by exactly the discount") {
    const DampedSystem sys(model::make_fig1(), kExampleLambda);
    PeriodicGrid grid(64);
    const auto p = coarse_params();
    const double q = std::exp(-kExampleLambda * p.dt);
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const auto u = random_trig(grid, rng);
        const auto w = random_trig(grid, rng);
        const auto tu = solver::lo_step(u, sys, p);
        const auto tw = solver::lo_step(w, sys, p);
        CHECK(tu.sup_diff(tw) <= q * u.sup_diff(w));
    }
}

TEST_CASE("stationary solution of the pendulum vanishes at the rest point") {
    const DampedSystem sys(model::make_pendulum(), kExampleLambda);
    const auto u = solver::stationary(sys, PeriodicGrid(64), coarse_params());
    CHECK(std::abs(u[0]) <= 5e-3);
    CHECK(u.min_value() >= -5e-3);
}

TEST_CASE("stationary solution accuracy on the fig1 system") {
    const DampedSystem sys(model::make_fig1(), kExampleLambda);
    SolverParams p;
    p.dt = 4e-3;
    p.v_max = 25.0;
    const auto u = solver::stationary(sys, PeriodicGrid(128), p);
    const auto exact = GridFunction::sample(u.grid(), model::fig1_stationary_solution);
    CHECK(u.sup_diff(exact) <= 5e-2);
}

TEST_CASE("offset in the Hamiltonian shifts the solution by -c/lambda") {
    const double c = 0.3;
    const auto base = model::make_fig1();
    const auto shifted = std::make_shared<model::MechanicalHamiltonian>(
        base->drift(), base->potential(), base->offset() + c);
    const DampedSystem sys0(base, kExampleLambda), sys1(shifted, kExampleLambda);
    PeriodicGrid grid(64);
    const auto p = coarse_params();
    const auto u0 = solver::stationary(sys0, grid, p, 1e-8);
    const auto u1 = solver::stationary(sys1, grid, p, 1e-8);
    for (int i = 0; i < grid.size(); ++i)
        CHECK(u1[i] == doctest::Approx(u0[i] - c / kExampleLambda).epsilon(1e-7));
}

TEST_CASE("evolve bookkeeping") {
    const DampedSystem sys(model::make_pendulum(), kExampleLambda);
    PeriodicGrid grid(64);
    const auto p = coarse_params();
    const auto psi = GridFunction::sample(grid, [](double x) { return std::cos(x); });

    // t = 0 is the empty composition
    const auto none = solver::evolve(psi, sys, 0.0, p);
    CHECK(none.final.values() == psi.values());

    const auto evo = solver::evolve(psi, sys, 1.0, p, {0.0, 0.5, 1.0});
    REQUIRE(evo.snapshots.size() == 3);
    CHECK(evo.snapshot_times[0] == 0.0);
    CHECK(evo.snapshot_times[1] == doctest::Approx(0.5));
    CHECK(evo.snapshots[0].values() == psi.values());
}

TEST_CASE("zero datum stays zero at the pendulum rest point") {
    const DampedSystem sys(model::make_pendulum(), kExampleLambda);
    PeriodicGrid grid(64);
    const auto evo = solver::evolve(GridFunction(grid, 0.0), sys, 2.0, coarse_params());
    CHECK(std::abs(evo.final[0]) <= 1e-10);
}

TEST_CASE("finite horizon kernel") {
    const DampedSystem sys(model::make_pendulum(), kExampleLambda);
    PeriodicGrid grid(64);
    const auto p = coarse_params();

    // the resting curve has zero cost: h(0, 0) = 0
    const auto k2 = solver::finite_horizon_kernel(sys, grid, 0, 2.0, p);
    CHECK(std::abs(k2.values[0]) <= 5e-3);
    CHECK(k2.unreachable_count == 0);  // v_max t covers the circle

    // two steps reach at most 2 v_max dt = 0.4; opposite points are flagged
    const auto kshort = solver::finite_horizon_kernel(sys, grid, 0, 2.0 * p.dt, p);
    CHECK(kshort.unreachable_count > 0);
    CHECK_FALSE(kshort.reachable[grid.size() / 2]);
    CHECK(kshort.reachable[0]);

    // nonnegative running cost keeps the pendulum kernel nonnegative
    for (int i = 0; i < grid.size(); ++i) CHECK(k2.values[i] >= -1e-12);

    // dominated by the straight-line action up to the discounted leak of the
    // seed's interpolation spike (the sentinel is resolved only to the width
    // the endpoint refinement can reach, which costs O(1) in the first step)
    const double lambda = kExampleLambda;
    const auto* mech = sys.mechanical();
    for (int i = 1; i <= 4; ++i) {
        const double x = grid.node(i);
        const double v = x / 2.0;
        double straight = 0.0;  // Simpson quadrature of int e^{lambda tau} L
        const int m = 200;
        for (int j = 0; j <= m; ++j) {
            const double s = static_cast<double>(j) / m;
            const double wj = (j == 0 || j == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            straight += wj * std::exp(lambda * (-2.0 + 2.0 * s)) * mech->lagrangian(x * s, v);
        }
        straight *= 2.0 / (3.0 * m);
        CHECK(k2.values[i] <= straight + 2.0);
    }
}

TEST_CASE("the one-step minimum is dominated by explicit candidates on smooth data") {
    const DampedSystem sys(model::make_fig1(), kExampleLambda);
    PeriodicGrid grid(64);
    const auto p = coarse_params();
    const auto u = GridFunction::sample(grid, [](double x) { return std::cos(x); });
    const auto stepped = solver::lo_step(u, sys, p);
    const double q = std::exp(-kExampleLambda * p.dt);
    const double w = -std::expm1(-kExampleLambda * p.dt) / kExampleLambda;
    const auto* mech = sys.mechanical();
    for (int i = 0; i < grid.size(); i += 7) {
        const double x = grid.node(i);
        for (double y : {x - 2.0 * grid.dx(), x + 0.5 * grid.dx(), x}) {
            const double cand = q * u.interp(y) + w * mech->lagrangian(0.5 * (x + y), (x - y) / p.dt);
            CHECK(stepped[i] <= cand + 1e-9);
        }
    }
}

TEST_CASE("backward characteristic of the pendulum rests at the origin") {
    const DampedSystem sys(model::make_pendulum(), kExampleLambda);
    PeriodicGrid grid(64);
    const auto p = coarse_params();
    const auto u = solver::stationary(sys, grid, p);
    const auto curve = solver::backward_characteristic(u, sys, 0.0, 2.0, p);
    for (double x : curve.positions) CHECK(std::abs(x) <= 1e-9);
    for (double v : curve.velocities) CHECK(std::abs(v) <= 1e-9);
}

TEST_CASE("backward characteristics follow the reversed graph dynamics") {
    const DampedSystem sys(model::make_fig1(), kExampleLambda);
    PeriodicGrid grid(256);
    SolverParams p;
    p.dt = 2e-3;
    p.v_max = 25.0;
    const auto u = solver::stationary(sys, grid, p);
    for (double x0 : {0.4, 2.2, 5.0}) {
        const auto curve = solver::backward_characteristic(u, sys, x0, 2.0, p);
        // reversed reference dynamics xdot = -(2 + sin x)
        double xr = x0;
        double dev = 0.0;
        for (std::size_t k = 1; k < curve.positions.size(); ++k) {
            auto f = [](double x) { return -(2.0 + std::sin(x)); };
            const double k1 = f(xr), k2 = f(xr + 0.5 * p.dt * k1), k3 = f(xr + 0.5 * p.dt * k2),
                         k4 = f(xr + p.dt * k3);
            xr += p.dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            dev = std::max(dev, std::abs(curve.positions[k] - xr));
        }
        CHECK(dev <= 2.0 * grid.dx());
        // curve invariants: continuity and the a priori speed bound
        for (std::size_t k = 0; k + 1 < curve.positions.size(); ++k)
            CHECK(std::abs(curve.positions[k] - curve.positions[k + 1]) <= p.v_max * p.dt + 1e-12);
        for (double v : curve.velocities) {
            CHECK(std::abs(v) <= p.v_max);
            CHECK(std::abs(v) <= 4.0);  // physical speeds on the graph are below 3
        }
    }
}

TEST_CASE("velocity bound reported when the search window saturates") {
    // drift 12 wants velocities near 12, far beyond v_max = 8
    const auto fast = std::make_shared<model::MechanicalHamiltonian>(
        12.0, model::TrigPoly({0.0, 0.5}, {}));
    const DampedSystem sys(fast, kExampleLambda);
    PeriodicGrid grid(64);
    const auto p = coarse_params();
    GridFunction u(grid, 0.0);
    CHECK_THROWS_AS(solver::lo_step(u, sys, p), VelocityBoundError);

    solver::StepReport rep;
    CHECK_NOTHROW(solver::lo_step(u, sys, p, BoundaryPolicy::Flag, &rep));
    CHECK(rep.boundary_active);
    CHECK(rep.boundary_index >= 0);
}

TEST_CASE("agreement with the brute-force dynamic program at coarse size") {
    const DampedSystem sys(model::make_pendulum(), kExampleLambda);
    PeriodicGrid grid(64);
    const auto p = coarse_params();
    const auto u = solver::stationary(sys, grid, p);
    const auto oracle = testsupport::dp_oracle_stationary(sys, grid, p.dt, p.v_max, 321);
    CHECK(u.sup_diff(oracle) <= 5e-2);
}

TEST_CASE("stationary iteration cap raises a convergence error") {
    const DampedSystem sys(model::make_fig1(), kExampleLambda);
    CHECK_THROWS_AS(solver::stationary(sys, PeriodicGrid(64), coarse_params(), 1e-8, 3),
                    ConvergenceError);
}

TEST_CASE("threaded step is identical to the serial step") {
    const DampedSystem sys(model::make_fig1(), kExampleLambda);
    PeriodicGrid grid(64);
    std::mt19937_64 rng(17);
    const auto u = random_trig(grid, rng);
    const auto serial = solver::lo_step(u, sys, coarse_params(), BoundaryPolicy::Throw, nullptr, 1);
    const auto threaded = solver::lo_step(u, sys, coarse_params(), BoundaryPolicy::Throw, nullptr, 3);
    CHECK(serial.values() == threaded.values());
}
