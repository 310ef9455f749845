#include "kamlab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kamlab::model {

namespace {

bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// In-place solve of a small dense system a * x = b with partial pivoting.
void solve_small(Mat a, Vec b, Vec& x) {
    const int n = a.rows;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        if (a(k, k) == 0.0) throw ConvergenceError("legendre_transform: singular H_pp", 0.0);
        for (int i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    x.assign(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
}

double norm_inf(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Smallest eigenvalue of a small symmetric matrix (cyclic Jacobi).
double min_symmetric_eig(Mat a) {
    const int n = a.rows;
    if (n == 1) return a(0, 0);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
                const double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    double m = a(0, 0);
    for (int i = 1; i < n; ++i) m = std::min(m, a(i, i));
    return m;
}

}  // namespace

void Hamiltonian::hess_xx(const Vec& x, const Vec& p, Mat& out) const {
    const int n = dim();
    out = Mat(n, n);
    const double h = 1e-5;
    Vec xe = x, gp(n), gm(n);
    for (int j = 0; j < n; ++j) {
        xe[j] = x[j] + h;
        grad_x(xe, p, gp);
        xe[j] = x[j] - h;
        grad_x(xe, p, gm);
        xe[j] = x[j];
        for (int i = 0; i < n; ++i) out(i, j) = (gp[i] - gm[i]) / (2.0 * h);
    }
}

void Hamiltonian::hess_px(const Vec& x, const Vec& p, Mat& out) const {
    const int n = dim();
    out = Mat(n, n);
    const double h = 1e-5;
    Vec xe = x, gp(n), gm(n);
    for (int j = 0; j < n; ++j) {
        xe[j] = x[j] + h;
        grad_p(xe, p, gp);
        xe[j] = x[j] - h;
        grad_p(xe, p, gm);
        xe[j] = x[j];
        for (int i = 0; i < n; ++i) out(i, j) = (gp[i] - gm[i]) / (2.0 * h);
    }
}

EvalBundle eval_hamiltonian(const Hamiltonian& h, const Vec& x, const Vec& p) {
    if (static_cast<int>(x.size()) != h.dim() || static_cast<int>(p.size()) != h.dim())
        throw DomainError("eval_hamiltonian: dimension mismatch");
    if (!all_finite(x) || !all_finite(p)) throw DomainError("eval_hamiltonian: non-finite input");
    EvalBundle out;
    out.h = h.value(x, p);
    h.grad_x(x, p, out.h_x);
    h.grad_p(x, p, out.h_p);
    h.hess_pp(x, p, out.h_pp);
    if (!std::isfinite(out.h) || !all_finite(out.h_x) || !all_finite(out.h_p) || !all_finite(out.h_pp.a))
        throw DomainError("eval_hamiltonian: non-finite evaluation");
    return out;
}

LagrangianValue legendre_transform(const Hamiltonian& h, const Vec& x, const Vec& v) {
    if (!all_finite(x) || !all_finite(v)) throw DomainError("legendre_transform: non-finite input");
    LagrangianValue out;
    if (h.closed_form_legendre(x, v, out)) return out;

    const int n = h.dim();
    Vec p(n, 0.0), hp(n), r(n), step, trial(n), hp_trial(n);
    Mat hpp;
    h.grad_p(x, p, hp);
    for (int i = 0; i < n; ++i) r[i] = hp[i] - v[i];
    double res = norm_inf(r);
    for (int iter = 0; iter < 100 && res > 1e-10; ++iter) {
        h.hess_pp(x, p, hpp);
        Vec rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = -r[i];
        solve_small(hpp, rhs, step);
        // backtracking on the residual
        double s = 1.0;
        while (true) {
            for (int i = 0; i < n; ++i) trial[i] = p[i] + s * step[i];
            h.grad_p(x, trial, hp_trial);
            double res_trial = 0.0;
            for (int i = 0; i < n; ++i) res_trial = std::max(res_trial, std::abs(hp_trial[i] - v[i]));
            if (res_trial < res * (1.0 - 0.25 * s) || s < 1e-8) {
                p = trial;
                hp = hp_trial;
                res = res_trial;
                break;
            }
            s *= 0.5;
        }
        for (int i = 0; i < n; ++i) r[i] = hp[i] - v[i];
        res = norm_inf(r);
    }
    if (res > 1e-10) throw ConvergenceError("legendre_transform: Newton did not converge", res);
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += p[i] * v[i];
    out.value = dot - h.value(x, p);
    out.maximizer_p = p;
    return out;
}

ScaledSumHamiltonian::ScaledSumHamiltonian(std::shared_ptr<const Hamiltonian> base,
                                           std::shared_ptr<const Hamiltonian> pert, double eps)
    : base_(std::move(base)), pert_(std::move(pert)), eps_(eps) {
    if (base_->dim() != pert_->dim()) throw DomainError("ScaledSumHamiltonian: dimension mismatch");
}

double ScaledSumHamiltonian::value(const Vec& x, const Vec& p) const {
    return base_->value(x, p) + eps_ * pert_->value(x, p);
}

void ScaledSumHamiltonian::grad_x(const Vec& x, const Vec& p, Vec& out) const {
    Vec tmp;
    base_->grad_x(x, p, out);
    pert_->grad_x(x, p, tmp);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += eps_ * tmp[i];
}

void ScaledSumHamiltonian::grad_p(const Vec& x, const Vec& p, Vec& out) const {
    Vec tmp;
    base_->grad_p(x, p, out);
    pert_->grad_p(x, p, tmp);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += eps_ * tmp[i];
}

void ScaledSumHamiltonian::hess_pp(const Vec& x, const Vec& p, Mat& out) const {
    Mat tmp;
    base_->hess_pp(x, p, out);
    pert_->hess_pp(x, p, tmp);
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += eps_ * tmp.a[i];
}

void ScaledSumHamiltonian::hess_xx(const Vec& x, const Vec& p, Mat& out) const {
    Mat tmp;
    base_->hess_xx(x, p, out);
    pert_->hess_xx(x, p, tmp);
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += eps_ * tmp.a[i];
}

void ScaledSumHamiltonian::hess_px(const Vec& x, const Vec& p, Mat& out) const {
    Mat tmp;
    base_->hess_px(x, p, out);
    pert_->hess_px(x, p, tmp);
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += eps_ * tmp.a[i];
}

TonelliReport tonelli_check(const Hamiltonian& h, const TonelliSampleSpec& spec) {
    const int n = h.dim();
    TonelliReport rep;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    Mat hpp;
    Vec x(n), p(n);
    const double per = h.period();

    std::vector<Vec> dirs;
    if (n == 1) {
        dirs.push_back(Vec{1.0});
        dirs.push_back(Vec{-1.0});
    } else {
        for (int d = 0; d < spec.directions; ++d) {
            Vec e(n, 0.0);
            const double ang = kTwoPi * d / spec.directions;
            e[0] = std::cos(ang);
            e[1] = std::sin(ang);
            dirs.push_back(e);
        }
    }

    for (int ix = 0; ix < spec.x_samples; ++ix) {
        for (int d = 0; d < n; ++d) x[d] = per * ix / spec.x_samples;
        for (const auto& e : dirs) {
            for (double r : spec.radii) {
                for (int d = 0; d < n; ++d) p[d] = r * e[d];
                h.hess_pp(x, p, hpp);
                rep.min_eigenvalue = std::min(rep.min_eigenvalue, min_symmetric_eig(hpp));
            }
        }
    }

    rep.growth.assign(spec.radii.size(), std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < spec.radii.size(); ++j) {
        const double r = spec.radii[j];
        for (int ix = 0; ix < spec.x_samples; ++ix) {
            for (int d = 0; d < n; ++d) x[d] = per * ix / spec.x_samples;
            for (const auto& e : dirs) {
                for (int d = 0; d < n; ++d) p[d] = r * e[d];
                rep.growth[j] = std::min(rep.growth[j], h.value(x, p) / r);
            }
        }
    }

    rep.positive_definite = rep.min_eigenvalue > 0.0;
    rep.superlinear_trend = true;
    for (std::size_t j = 1; j < rep.growth.size(); ++j)
        if (!(rep.growth[j] > rep.growth[j - 1])) rep.superlinear_trend = false;
    rep.pass = rep.positive_definite && rep.superlinear_trend;
    return rep;
}

}  // namespace kamlab::model
