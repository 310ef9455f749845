#include "kamlab/flow.hpp"

#include <cmath>
#include <limits>

namespace kamlab::flow {

namespace {

struct StrangState {
    double x, p;
    // tangent columns, row-major 2x2: [dx/dx0 dx/dp0; dp/dx0 dp/dp0]
    double g00 = 1, g01 = 0, g10 = 0, g11 = 1;
};

// One Strang step. Substep order: damp(h/2), kick(h/2), drift(h), kick(h/2),
// damp(h/2). The damping substep is exact, so the step Jacobian determinant
// is exactly e^{-lambda h}.
inline void strang_step(const model::MechanicalHamiltonian& mh, double lambda, double h,
                        StrangState& s, bool with_tangent) {
    const double df = std::exp(-lambda * (0.5 * h));
    const double d = mh.drift();

    s.p *= df;
    if (with_tangent) { s.g10 *= df; s.g11 *= df; }

    double k = mh.hx(s.x);
    s.p -= 0.5 * h * k;
    if (with_tangent) {
        const double c = -0.5 * h * mh.vpp(s.x);
        s.g10 += c * s.g00;
        s.g11 += c * s.g01;
    }

    s.x += h * (s.p + d);
    if (with_tangent) {
        s.g00 += h * s.g10;
        s.g01 += h * s.g11;
    }

    k = mh.hx(s.x);
    s.p -= 0.5 * h * k;
    if (with_tangent) {
        const double c = -0.5 * h * mh.vpp(s.x);
        s.g10 += c * s.g00;
        s.g11 += c * s.g01;
    }

    s.p *= df;
    if (with_tangent) { s.g10 *= df; s.g11 *= df; }
}

// Generic RK4 on z = (x, p) with optional simultaneous matrix variational
// equation Gdot = A(z) G.
struct Rk4Work {
    Vec hx, hp;
    Mat hpp, hxx, hpx;
    Vec zx, zp;
    Mat a;  // 2n x 2n Jacobian of the field
};

void field(const DampedSystem& sys, const Vec& x, const Vec& p, Vec& fx, Vec& fp, Rk4Work& w) {
    const auto& h = *sys.hamiltonian;
    h.grad_p(x, p, fx);
    h.grad_x(x, p, w.hx);
    const int n = h.dim();
    fp.resize(n);
    for (int i = 0; i < n; ++i) fp[i] = -w.hx[i] - sys.lambda * p[i];
}

// A = [[H_px, H_pp], [-H_xx, -H_px^T - lambda I]]
void field_jacobian(const DampedSystem& sys, const Vec& x, const Vec& p, Mat& a, Rk4Work& w) {
    const auto& h = *sys.hamiltonian;
    const int n = h.dim();
    h.hess_px(x, p, w.hpx);
    h.hess_pp(x, p, w.hpp);
    h.hess_xx(x, p, w.hxx);
    a = Mat(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a(i, j) = w.hpx(i, j);
            a(i, n + j) = w.hpp(i, j);
            a(n + i, j) = -w.hxx(i, j);
            a(n + i, n + j) = -w.hpx(j, i) - (i == j ? sys.lambda : 0.0);
        }
}

struct Rk4State {
    Vec x, p;
    Mat g;
};

void rk4_step(const DampedSystem& sys, double h, Rk4State& s, bool with_tangent, Rk4Work& w) {
    const int n = static_cast<int>(s.x.size());
    auto axpy = [n](const Vec& base, double c, const Vec& d, Vec& out) {
        out.resize(n);
        for (int i = 0; i < n; ++i) out[i] = base[i] + c * d[i];
    };
    Vec k1x(n), k1p(n), k2x(n), k2p(n), k3x(n), k3p(n), k4x(n), k4p(n), tx(n), tp(n);
    Mat K1, K2, K3, K4, tg;

    field(sys, s.x, s.p, k1x, k1p, w);
    if (with_tangent) {
        field_jacobian(sys, s.x, s.p, w.a, w);
        K1 = w.a * s.g;
    }

    axpy(s.x, 0.5 * h, k1x, tx);
    axpy(s.p, 0.5 * h, k1p, tp);
    field(sys, tx, tp, k2x, k2p, w);
    if (with_tangent) {
        tg = s.g;
        for (std::size_t i = 0; i < tg.a.size(); ++i) tg.a[i] += 0.5 * h * K1.a[i];
        field_jacobian(sys, tx, tp, w.a, w);
        K2 = w.a * tg;
    }

    axpy(s.x, 0.5 * h, k2x, tx);
    axpy(s.p, 0.5 * h, k2p, tp);
    field(sys, tx, tp, k3x, k3p, w);
    if (with_tangent) {
        tg = s.g;
        for (std::size_t i = 0; i < tg.a.size(); ++i) tg.a[i] += 0.5 * h * K2.a[i];
        field_jacobian(sys, tx, tp, w.a, w);
        K3 = w.a * tg;
    }

    axpy(s.x, h, k3x, tx);
    axpy(s.p, h, k3p, tp);
    field(sys, tx, tp, k4x, k4p, w);
    if (with_tangent) {
        tg = s.g;
        for (std::size_t i = 0; i < tg.a.size(); ++i) tg.a[i] += h * K3.a[i];
        field_jacobian(sys, tx, tp, w.a, w);
        K4 = w.a * tg;
    }

    for (int i = 0; i < n; ++i) {
        s.x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
        s.p[i] += h / 6.0 * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
    }
    if (with_tangent)
        for (std::size_t i = 0; i < s.g.a.size(); ++i)
            s.g.a[i] += h / 6.0 * (K1.a[i] + 2.0 * K2.a[i] + 2.0 * K3.a[i] + K4.a[i]);
}

PhaseTrajectory integrate(const DampedSystem& sys, const Vec& x0, const Vec& p0, double t,
                          const StepSpec& spec, bool with_tangent) {
    const int n = sys.hamiltonian->dim();
    if (static_cast<int>(x0.size()) != n || static_cast<int>(p0.size()) != n)
        throw DomainError("flow_map: dimension mismatch");
    if (spec.dt <= 0.0) throw DomainError("flow_map: dt must be positive");

    Method method = spec.method;
    const auto* mech = sys.mechanical();
    if (method == Method::Auto) method = mech ? Method::Strang : Method::RK4;
    if (method == Method::Strang && !mech)
        throw DomainError("flow_map: Strang splitting needs a mechanical Hamiltonian");

    PhaseTrajectory traj;
    traj.has_tangent = with_tangent;
    const long nsteps = t == 0.0 ? 0 : std::max<long>(1, std::lround(std::abs(t) / spec.dt));
    const double h = nsteps == 0 ? 0.0 : t / static_cast<double>(nsteps);

    auto record = [&](double time, const Vec& x, const Vec& p, const Mat& g) {
        traj.times.push_back(time);
        traj.x.push_back(x);
        traj.p.push_back(p);
        if (with_tangent) {
            traj.tangent.push_back(g);
            traj.det.push_back(det(g));
        }
    };

    auto check_escape = [&](const Vec& p, double time) {
        for (double v : p)
            if (!std::isfinite(v) || std::abs(v) > spec.escape_radius)
                throw DivergenceError("flow_map: trajectory escaped (|p| > escape radius)", time);
    };

    Mat g = Mat::identity(2 * n);
    if (method == Method::Strang) {
        StrangState s{x0[0], p0[0]};
        record(0.0, {s.x}, {s.p}, g);
        for (long k = 1; k <= nsteps; ++k) {
            strang_step(*mech, sys.lambda, h, s, with_tangent);
            check_escape({s.p}, k * h);
            if (k % spec.sample_stride == 0 || k == nsteps) {
                if (with_tangent) {
                    g(0, 0) = s.g00; g(0, 1) = s.g01; g(1, 0) = s.g10; g(1, 1) = s.g11;
                }
                record(k * h, {s.x}, {s.p}, g);
            }
        }
    } else {
        Rk4State s{x0, p0, g};
        Rk4Work w;
        record(0.0, s.x, s.p, s.g);
        for (long k = 1; k <= nsteps; ++k) {
            rk4_step(sys, h, s, with_tangent, w);
            check_escape(s.p, k * h);
            if (k % spec.sample_stride == 0 || k == nsteps) record(k * h, s.x, s.p, s.g);
        }
    }
    return traj;
}

}  // namespace

PhaseTrajectory flow_map(const DampedSystem& sys, const Vec& x0, const Vec& p0, double t,
                         const StepSpec& spec) {
    return integrate(sys, x0, p0, t, spec, false);
}

PhaseTrajectory tangent_flow(const DampedSystem& sys, const Vec& x0, const Vec& p0, double t,
                             const StepSpec& spec) {
    return integrate(sys, x0, p0, t, spec, true);
}

PhaseTrajectory flow_map(const DampedSystem& sys, double x0, double p0, double t, const StepSpec& spec) {
    return integrate(sys, {x0}, {p0}, t, spec, false);
}

PhaseTrajectory tangent_flow(const DampedSystem& sys, double x0, double p0, double t, const StepSpec& spec) {
    return integrate(sys, {x0}, {p0}, t, spec, true);
}

RotationResult rotation_number(const DampedSystem& sys, const std::function<double(double)>& graph,
                               double horizon, const StepSpec& spec, double oscillation_tol) {
    if (sys.hamiltonian->dim() != 1) throw DomainError("rotation_number: n = 1 only");
    const double per = sys.period();
    const auto& h = *sys.hamiltonian;

    auto speed = [&](double x) {
        const double xr = wrap(x, per);
        Vec hp;
        h.grad_p({xr}, {graph(xr)}, hp);
        return hp[0];
    };

    // sign-definiteness scan
    const int m = 4096;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::vector<double> inv(m);
    bool definite = true;
    for (int i = 0; i < m; ++i) {
        const double f = speed(per * i / m);
        lo = std::min(lo, f);
        hi = std::max(hi, f);
        if (std::abs(f) < 1e-12) definite = false;
        inv[i] = f;
    }
    if (definite && (lo > 0.0 || hi < 0.0)) {
        // omega = period / oint dx / f  via the periodic trapezoid rule
        for (auto& f : inv) f = 1.0 / f;
        RotationResult r;
        r.omega = 1.0 / stable_mean(inv);
        r.converged = true;
        r.method = "period-integral";
        return r;
    }

    // long-time average of the lifted dynamics
    const double dt = std::max(spec.dt, 1e-3);
    const long nsteps = std::lround(horizon / dt);
    double x = 0.0;
    std::vector<double> checkpoints;
    const long first_cp = nsteps / 10;  // estimates collected over [T/10, T]
    for (long k = 1; k <= nsteps; ++k) {
        const double k1 = speed(x);
        const double k2 = speed(x + 0.5 * dt * k1);
        const double k3 = speed(x + 0.5 * dt * k2);
        const double k4 = speed(x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (k >= first_cp && k % std::max<long>(1, nsteps / 32) == 0)
            checkpoints.push_back(x / (k * dt));
    }
    RotationResult r;
    r.method = "averaging";
    r.omega = x / horizon;
    double osc = 0.0;
    for (double c : checkpoints) osc = std::max(osc, std::abs(c - r.omega));
    r.oscillation = osc;
    r.converged = osc <= oscillation_tol;
    return r;
}

RotationResult rotation_number(const DampedSystem& sys, const model::TrigPoly& graph, double horizon,
                               const StepSpec& spec) {
    return rotation_number(sys, [&graph](double x) { return graph.value(x); }, horizon, spec);
}

}  // namespace kamlab::flow
