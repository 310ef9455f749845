#pragma once

#include <memory>
#include <string>

#include "kamlab/hamiltonian.hpp"

namespace kamlab::model {

// Built-in example systems. All use the damping index kExampleLambda unless
// the caller overrides it when assembling the DampedSystem.

/// H = 1/2 (p+2)^2 - 2 sin x + cos(x)/sqrt(2) + cos(2x)/4. Carries the
/// invariant graph p = sin x with rotation number sqrt(3) at
/// lambda = 1/sqrt(2); the exact stationary solution is
/// u(x) = -cos x - 9 sqrt(2)/4.
std::shared_ptr<const MechanicalHamiltonian> make_fig1();

/// Dissipative pendulum H = 1/2 p^2 + cos x - 1 (the alpha = 0 family member).
std::shared_ptr<const MechanicalHamiltonian> make_pendulum();

/// One-parameter family
///   H_a = 1/2 (p+2a)^2 + (cos x - 1)
///         + a (3 - 2a + 2 sin x - cos x + cos(x)/sqrt(2) - cos(2x)/4),
/// written exactly as published; note that a = 1 does NOT reduce to make_fig1
/// (the sin x and cos 2x terms differ in sign).
std::shared_ptr<const MechanicalHamiltonian> make_fig2(double alpha);

/// Convex interpolation (1-a) * pendulum + a * fig1, which is again
/// mechanical with drift 2a. Reduces exactly to the pendulum at a = 0 and to
/// make_fig1 at a = 1.
std::shared_ptr<const MechanicalHamiltonian> make_fig2_interp(double alpha);

/// Lookup by name: "fig1", "pendulum", "fig2:<alpha>", "fig2_interp:<alpha>",
/// "rigid:<omega0>". Throws ConfigError for unknown names.
std::shared_ptr<const Hamiltonian> make_by_name(const std::string& name);

/// Analytic stationary solution of the fig1 system at lambda = 1/sqrt(2).
double fig1_stationary_solution(double x);

/// The invariant graph of the fig1 system, P(x) = sin x, as a TrigPoly.
TrigPoly fig1_graph();

}  // namespace kamlab::model
