#include "kamlab/registry.hpp"

#include <cmath>

namespace kamlab::model {

namespace {

const double kInvSqrt2 = 0.70710678118654752440;

TrigPoly fig1_potential() {
    // -2 sin x + cos(x)/sqrt(2) + cos(2x)/4
    return TrigPoly({0.0, kInvSqrt2, 0.25}, {-2.0});
}

TrigPoly pendulum_potential() {
    // cos x - 1
    return TrigPoly({-1.0, 1.0}, {});
}

}  // namespace

std::shared_ptr<const MechanicalHamiltonian> make_fig1() {
    return std::make_shared<MechanicalHamiltonian>(2.0, fig1_potential());
}

std::shared_ptr<const MechanicalHamiltonian> make_pendulum() {
    return std::make_shared<MechanicalHamiltonian>(0.0, pendulum_potential());
}

std::shared_ptr<const MechanicalHamiltonian> make_fig2(double a) {
    // cos0: -1 + 3a - 2a^2, cos1: 1 - a + a/sqrt(2), cos2: -a/4, sin1: 2a
    TrigPoly v({-1.0 + 3.0 * a - 2.0 * a * a, 1.0 - a + a * kInvSqrt2, -0.25 * a}, {2.0 * a});
    return std::make_shared<MechanicalHamiltonian>(2.0 * a, std::move(v));
}

std::shared_ptr<const MechanicalHamiltonian> make_fig2_interp(double a) {
    // (1-a) * (1/2 p^2 + cos x - 1) + a * fig1 = 1/2 (p + 2a)^2 + V_a(x)
    // with V_a = (1-a)(cos x - 1) + a V_fig1 + 2a(1-a).
    TrigPoly v = TrigPoly::combine(1.0 - a, pendulum_potential(), a, fig1_potential());
    v.add_constant(2.0 * a * (1.0 - a));
    return std::make_shared<MechanicalHamiltonian>(2.0 * a, std::move(v));
}

std::shared_ptr<const Hamiltonian> make_by_name(const std::string& name) {
    const auto colon = name.find(':');
    const std::string head = name.substr(0, colon);
    double arg = 0.0;
    if (colon != std::string::npos) {
        try {
            arg = std::stod(name.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("bad numeric argument in system name '" + name + "'");
        }
    }
    if (head == "fig1") return make_fig1();
    if (head == "pendulum") return make_pendulum();
    if (head == "fig2") return make_fig2(arg);
    if (head == "fig2_interp") return make_fig2_interp(arg);
    if (head == "rigid") return std::make_shared<RigidRotor>(colon == std::string::npos ? 1.0 : arg);
    throw ConfigError("unknown system '" + name + "'");
}

double fig1_stationary_solution(double x) {
    return -std::cos(x) - 9.0 * std::sqrt(2.0) / 4.0;
}

TrigPoly fig1_graph() { return TrigPoly({0.0}, {1.0}); }

}  // namespace kamlab::model
