#include "kamlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace kamlab::analysis {

namespace {

double lag_value(const flow::DampedSystem& sys, double x, double v) {
    if (const auto* mech = sys.mechanical()) return mech->lagrangian(x, v);
    const double per = sys.period();
    return model::legendre_transform(*sys.hamiltonian, {wrap(x, per)}, {v}).value;
}

double ham_value(const flow::DampedSystem& sys, double x, double p) {
    return sys.hamiltonian->value({wrap(x, sys.period())}, {p});
}

double ham_p(const flow::DampedSystem& sys, double x, double p) {
    Vec hp;
    sys.hamiltonian->grad_p({wrap(x, sys.period())}, {p}, hp);
    return hp[0];
}

}  // namespace

double semiconcavity_constant(const solver::GridFunction& u) {
    const int n = u.size();
    const double inv_dx2 = 1.0 / (u.dx() * u.dx());
    double c = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const int ip = i + 1 == n ? 0 : i + 1;
        const int im = i == 0 ? n - 1 : i - 1;
        c = std::max(c, (u[ip] + u[im] - 2.0 * u[i]) * inv_dx2);
    }
    return c;
}

SuperdiffField superdifferential(const solver::GridFunction& u) {
    const int n = u.size();
    const double inv_dx = 1.0 / u.dx();
    SuperdiffField f;
    f.d_plus.resize(n);
    f.d_minus.resize(n);
    f.lower.resize(n);
    f.upper.resize(n);
    f.differentiable.resize(n);
    f.c_scl = std::max(semiconcavity_constant(u), 0.0);
    // fp floor keeps the flag meaningful for data with vanishing curvature
    const double sup = std::max(std::abs(u.min_value()), std::abs(u.max_value()));
    const double tol = 3.0 * u.dx() * f.c_scl + 64.0 * std::numeric_limits<double>::epsilon() * sup * inv_dx;
    for (int i = 0; i < n; ++i) {
        const int ip = i + 1 == n ? 0 : i + 1;
        const int im = i == 0 ? n - 1 : i - 1;
        f.d_plus[i] = (u[ip] - u[i]) * inv_dx;
        f.d_minus[i] = (u[i] - u[im]) * inv_dx;
        f.lower[i] = std::min(f.d_plus[i], f.d_minus[i]);
        f.upper[i] = std::max(f.d_plus[i], f.d_minus[i]);
        f.differentiable[i] = std::abs(f.d_minus[i] - f.d_plus[i]) <= tol ? 1 : 0;
    }
    return f;
}

// ---------------------------------------------------------------------------

namespace {

// Components of a Set1D as merged closed intervals (points are degenerate).
std::vector<Interval> components(const Set1D& s) {
    std::vector<Interval> c;
    for (double p : s.points) c.push_back({p, p});
    for (const auto& iv : s.intervals) {
        if (iv.hi < iv.lo) throw DomainError("hausdorff_distance: malformed interval");
        c.push_back(iv);
    }
    std::sort(c.begin(), c.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const auto& iv : c) {
        if (!merged.empty() && iv.lo <= merged.back().hi)
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        else
            merged.push_back(iv);
    }
    return merged;
}

double dist_to_components(double x, const std::vector<Interval>& c) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& iv : c) {
        if (x < iv.lo)
            d = std::min(d, iv.lo - x);
        else if (x > iv.hi)
            d = std::min(d, x - iv.hi);
        else
            return 0.0;
    }
    return d;
}

// sup over a in A of dist(a, B); dist(., B) is piecewise linear with local
// maxima only at component endpoints of A and at gap midpoints of B.
double directed_hausdorff(const std::vector<Interval>& a, const std::vector<Interval>& b) {
    std::vector<double> candidates;
    for (const auto& iv : a) {
        candidates.push_back(iv.lo);
        candidates.push_back(iv.hi);
        for (std::size_t j = 0; j + 1 < b.size(); ++j) {
            const double mid = 0.5 * (b[j].hi + b[j + 1].lo);
            if (mid > iv.lo && mid < iv.hi) candidates.push_back(mid);
        }
    }
    double d = 0.0;
    for (double x : candidates) d = std::max(d, dist_to_components(x, b));
    return d;
}

}  // namespace

double hausdorff_distance(const Set1D& a, const Set1D& b) {
    if (a.empty() || b.empty()) throw DomainError("hausdorff_distance: empty set");
    const auto ca = components(a), cb = components(b);
    return std::max(directed_hausdorff(ca, cb), directed_hausdorff(cb, ca));
}

double hausdorff_distance_points(std::span<const double> x1, std::span<const double> p1,
                                 std::span<const double> x2, std::span<const double> p2,
                                 double period) {
    if (x1.empty() || x2.empty()) throw DomainError("hausdorff_distance_points: empty set");
    auto directed = [&](std::span<const double> xa, std::span<const double> pa,
                        std::span<const double> xb, std::span<const double> pb) {
        double worst = 0.0;
        for (std::size_t i = 0; i < xa.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < xb.size(); ++j) {
                const double dx = wrap_signed(xa[i] - xb[j], period);
                const double dp = pa[i] - pb[j];
                best = std::min(best, dx * dx + dp * dp);
                if (best == 0.0) break;
            }
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    return std::max(directed(x1, p1, x2, p2), directed(x2, p2, x1, p1));
}

// ---------------------------------------------------------------------------

ErrorCurves error_curves(const std::vector<double>& times,
                         const std::vector<solver::GridFunction>& snapshots,
                         const solver::GridFunction& u_ref) {
    if (times.size() != snapshots.size()) throw DomainError("error_curves: times/snapshots mismatch");
    ErrorCurves out;
    out.times = times;
    const std::vector<double> dref = u_ref.centered_derivative();
    for (const auto& snap : snapshots) {
        if (!(snap.grid() == u_ref.grid())) throw DomainError("error_curves: grid mismatch");
        out.c0.push_back(snap.sup_diff(u_ref));
        const SuperdiffField sd = superdifferential(snap);
        double worst = 0.0;
        for (int i = 0; i < snap.size(); ++i)
            worst = std::max(worst, std::max(std::abs(sd.lower[i] - dref[i]),
                                             std::abs(sd.upper[i] - dref[i])));
        out.w1inf.push_back(out.c0.back() + worst);
    }
    return out;
}

RateFit fit_rate(const std::vector<double>& times, const std::vector<double>& errors) {
    const std::size_t n = times.size();
    if (n != errors.size() || n < 2) throw DomainError("fit_rate: need matching time/error samples");
    std::vector<double> logs(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(errors[i] > 0.0)) throw DomainError("fit_rate: errors must be positive");
        if (i > 0 && times[i] <= times[i - 1]) throw DomainError("fit_rate: times must increase");
        logs[i] = std::log(errors[i]);
    }

    // Floor: the first sample after which the log-error moves by < 1% over a
    // full time unit.
    double floor_time = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double target = times[i] + 1.0;
        if (target > times[n - 1]) break;
        std::size_t j = i;
        while (times[j] < target) ++j;
        const double lj = j == 0 ? logs[0]
                                 : logs[j - 1] + (logs[j] - logs[j - 1]) * (target - times[j - 1]) /
                                                     (times[j] - times[j - 1]);
        if (std::abs(lj - logs[i]) < 0.01) {
            floor_time = times[i];
            if (i == 0) throw DomainError("fit_rate: floor only (curve flat from the first sample)");
            break;
        }
    }

    std::vector<double> tf, lf;
    for (std::size_t i = 0; i < n; ++i)
        if (times[i] < floor_time) {
            tf.push_back(times[i]);
            lf.push_back(logs[i]);
        }
    if (tf.size() < 5) throw DomainError("fit_rate: need at least 5 samples above the floor");

    const LineFit fit = fit_line(tf, lf);
    RateFit out;
    out.log_intercept = fit.intercept;
    out.rate = -fit.slope;
    out.r_squared = fit.r_squared;
    out.floor_time = floor_time;
    out.used_samples = static_cast<int>(tf.size());
    return out;
}

// ---------------------------------------------------------------------------

double exactness_constant(std::span<const double> samples) {
    return stable_mean(samples);
}

double exactness_constant(const model::TrigPoly& p, int samples) {
    std::vector<double> v(samples);
    for (int i = 0; i < samples; ++i) v[i] = p.value(p.period() * i / samples);
    return stable_mean(v);
}

double exactness_constant(const solver::GridFunction& p) { return stable_mean(p.values()); }

double kam_invariance_residual(const flow::DampedSystem& sys, const model::TrigPoly& p, int samples) {
    const double per = sys.period();
    double worst = 0.0;
    Vec hx, hp;
    for (int i = 0; i < samples; ++i) {
        const double x = per * i / samples;
        const double px = p.value(x);
        sys.hamiltonian->grad_x({x}, {px}, hx);
        sys.hamiltonian->grad_p({x}, {px}, hp);
        worst = std::max(worst, std::abs(-hx[0] - sys.lambda * px - p.deriv(x) * hp[0]));
    }
    return worst;
}

double kam_invariance_residual(const flow::DampedSystem& sys, const solver::GridFunction& p) {
    const std::vector<double> dp = p.centered_derivative();
    double worst = 0.0;
    Vec hx, hp;
    for (int i = 0; i < p.size(); ++i) {
        const double x = p.grid().node(i);
        sys.hamiltonian->grad_x({x}, {p[i]}, hx);
        sys.hamiltonian->grad_p({x}, {p[i]}, hp);
        worst = std::max(worst, std::abs(-hx[0] - sys.lambda * p[i] - dp[i] * hp[0]));
    }
    return worst;
}

// ---------------------------------------------------------------------------

ResidualReport residual_checks(const solver::GridFunction& u, const flow::DampedSystem& sys,
                               const solver::CharacteristicCurve* curve, int domination_samples,
                               unsigned seed) {
    ResidualReport rep;
    const SuperdiffField sd = superdifferential(u);
    const std::vector<double> du = u.centered_derivative();
    for (int i = 0; i < u.size(); ++i) {
        if (!sd.differentiable[i]) continue;
        ++rep.differentiable_points;
        const double r = std::abs(sys.lambda * u[i] + ham_value(sys, u.grid().node(i), du[i]));
        rep.stationary_residual = std::max(rep.stationary_residual, r);
    }

    const double lambda = sys.lambda;
    if (curve && !curve->velocities.empty()) {
        rep.curve_checked = true;
        const double dt = curve->dt;
        const double w = -std::expm1(-lambda * dt) / lambda;
        const std::size_t k_steps = curve->velocities.size();
        double action = 0.0;
        for (std::size_t k = 0; k < k_steps; ++k) {
            const double mid = 0.5 * (curve->positions[k] + curve->positions[k + 1]);
            action += std::exp(-lambda * static_cast<double>(k) * dt) * w *
                      lag_value(sys, mid, curve->velocities[k]);
        }
        const double horizon = k_steps * dt;
        const double lhs = u.interp(curve->positions.front()) -
                           std::exp(-lambda * horizon) * u.interp(curve->positions.back());
        rep.calibration_defect = std::abs(lhs - action);
    }

    // Domination on random smooth comparison curves over [-1, 0]: the
    // discounted action must dominate the discounted increment of u.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double per = u.grid().period;
    rep.domination_min_margin = std::numeric_limits<double>::infinity();
    for (int s = 0; s < domination_samples; ++s) {
        const double a = per * unif(rng);
        const double b = a + per * (unif(rng) - 0.5);
        const double c1 = 0.8 * (unif(rng) - 0.5);
        const double c2 = 0.6 * (unif(rng) - 0.5);
        auto gamma = [&](double s01) {
            return a + (b - a) * s01 + c1 * std::sin(kTwoPi * s01) + c2 * std::sin(2.0 * kTwoPi * s01);
        };
        auto dgamma = [&](double s01) {
            return (b - a) + kTwoPi * c1 * std::cos(kTwoPi * s01) +
                   2.0 * kTwoPi * c2 * std::cos(2.0 * kTwoPi * s01);
        };
        // Simpson quadrature of int e^{lambda tau} L over tau in [-1, 0]
        const int m = 200;
        double integral = 0.0;
        for (int j = 0; j <= m; ++j) {
            const double s01 = static_cast<double>(j) / m;
            const double tau = -1.0 + s01;
            const double f = std::exp(lambda * tau) * lag_value(sys, gamma(s01), dgamma(s01));
            const double wj = (j == 0 || j == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            integral += wj * f;
        }
        integral *= 1.0 / (3.0 * m);
        const double lhs = u.interp(gamma(1.0)) - std::exp(-lambda) * u.interp(gamma(0.0));
        const double margin = integral - lhs;
        ++rep.domination_samples;
        if (margin < 0.0) ++rep.domination_violations;
        rep.domination_min_margin = std::min(rep.domination_min_margin, margin);
    }
    return rep;
}

// ---------------------------------------------------------------------------

SubstituteLagrangianProbe::SubstituteLagrangianProbe(solver::GridFunction u_minus,
                                                     const flow::DampedSystem& sys)
    : u_(std::move(u_minus)), du_(u_.grid(), u_.centered_derivative()), sys_(sys) {}

double SubstituteLagrangianProbe::l(double x, double w) const {
    return lag_value(sys_, x, w) - sys_.lambda * u_.interp(x) - w * du_.interp(x);
}

double SubstituteLagrangianProbe::f(double x, double w) const {
    const double p = du_.interp(x);
    return lag_value(sys_, x, w) + ham_value(sys_, x, p) - w * p;
}

double SubstituteLagrangianProbe::optimal_velocity(double x) const {
    return ham_p(sys_, x, du_.interp(x));
}

double SubstituteLagrangianProbe::discounted_l_integral(const solver::CharacteristicCurve& curve) const {
    const double lambda = sys_.lambda;
    const double dt = curve.dt;
    const double w = -std::expm1(-lambda * dt) / lambda;
    double integral = 0.0;
    for (std::size_t k = 0; k < curve.velocities.size(); ++k) {
        const double mid = 0.5 * (curve.positions[k] + curve.positions[k + 1]);
        integral += std::exp(-lambda * static_cast<double>(k) * dt) * w * l(mid, curve.velocities[k]);
    }
    return integral;
}

}  // namespace kamlab::analysis
