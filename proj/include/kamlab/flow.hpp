#pragma once

#include <functional>
#include <memory>

#include "kamlab/common.hpp"
#include "kamlab/hamiltonian.hpp"

namespace kamlab::flow {

enum class Method { Auto, Strang, RK4 };

struct StepSpec {
    double dt = 1e-3;
    Method method = Method::Auto;   // Auto: Strang for mechanical H, RK4 otherwise
    double escape_radius = 1e3;     // on |p|; backward integration expands
    int sample_stride = 1;          // record every k-th step
};

/// The damped system: xdot = H_p, pdot = -H_x - lambda p.
struct DampedSystem {
    std::shared_ptr<const model::Hamiltonian> hamiltonian;
    double lambda = kExampleLambda;

    DampedSystem(std::shared_ptr<const model::Hamiltonian> h, double lam)
        : hamiltonian(std::move(h)), lambda(lam) {
        if (!hamiltonian) throw DomainError("DampedSystem: null Hamiltonian");
        if (lambda < 0.0) throw DomainError("DampedSystem: lambda must be >= 0");
    }

    const model::MechanicalHamiltonian* mechanical() const {
        return dynamic_cast<const model::MechanicalHamiltonian*>(hamiltonian.get());
    }
    double period() const { return hamiltonian->period(); }
};

/// Exact damping substep of the splitting integrator: p -> e^{-lambda h} p.
inline double exact_damp(double p, double lambda, double h) { return std::exp(-lambda * h) * p; }

struct PhaseTrajectory {
    std::vector<double> times;
    std::vector<Vec> x;          // lifted coordinates (not wrapped)
    std::vector<Vec> p;
    std::vector<Mat> tangent;    // 2n x 2n, filled by tangent_flow
    std::vector<double> det;     // det of the accumulated tangent map
    bool has_tangent = false;

    const Vec& final_x() const { return x.back(); }
    const Vec& final_p() const { return p.back(); }
    const Mat& final_tangent() const { return tangent.back(); }
};

/**
 * Integrates the damped flow from (x0, p0) over [0, t] (t < 0 runs the
 * time-reversed field). The step count is round(|t|/dt) with the step size
 * adjusted so an integer number of steps lands exactly on t. Strang order:
 * damp-half, kick-half, drift, kick-half, damp-half.
 */
PhaseTrajectory flow_map(const DampedSystem& sys, const Vec& x0, const Vec& p0, double t,
                         const StepSpec& spec = {});

/// As flow_map, additionally propagating the variational (tangent) flow and
/// recording det(DPhi^t) at every sample.
PhaseTrajectory tangent_flow(const DampedSystem& sys, const Vec& x0, const Vec& p0, double t,
                             const StepSpec& spec = {});

// scalar convenience wrappers (n = 1)
PhaseTrajectory flow_map(const DampedSystem& sys, double x0, double p0, double t,
                         const StepSpec& spec = {});
PhaseTrajectory tangent_flow(const DampedSystem& sys, double x0, double p0, double t,
                             const StepSpec& spec = {});

struct RotationResult {
    double omega = 0.0;
    bool converged = false;
    std::string method;      // "period-integral" or "averaging"
    double oscillation = 0.0;
};

/**
 * Rotation number of the circle dynamics xdot = H_p(x, P(x)) induced on an
 * invariant graph P (n = 1). When the speed has a uniform sign the period
 * integral period / int dx / H_p is used (spectrally accurate); otherwise the
 * lift is integrated to the horizon and averaged, with a convergence check
 * over the last decade. converged == false means "no rotation" at the given
 * horizon; omega then carries the partial average.
 */
RotationResult rotation_number(const DampedSystem& sys, const std::function<double(double)>& graph,
                               double horizon = 2000.0, const StepSpec& spec = {},
                               double oscillation_tol = 1e-4);

RotationResult rotation_number(const DampedSystem& sys, const model::TrigPoly& graph,
                               double horizon = 2000.0, const StepSpec& spec = {});

}  // namespace kamlab::flow
