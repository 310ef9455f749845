#pragma once

#include <memory>
#include <vector>

#include "kamlab/common.hpp"
#include "kamlab/trig_poly.hpp"

namespace kamlab::model {

struct LagrangianValue {
    double value = 0.0;   // L(x, v)
    Vec maximizer_p;      // the covector achieving the conjugate maximum
};

/**
 * Hamiltonian on the cotangent bundle of a flat torus. First derivatives are
 * part of the contract; second derivatives in x and the mixed block default
 * to central differences of the exact gradients (the variational flow needs
 * them), and concrete classes override with analytic forms where available.
 */
class Hamiltonian {
  public:
    virtual ~Hamiltonian() = default;

    virtual int dim() const = 0;
    virtual double period() const { return kTwoPi; }

    virtual double value(const Vec& x, const Vec& p) const = 0;
    virtual void grad_x(const Vec& x, const Vec& p, Vec& out) const = 0;
    virtual void grad_p(const Vec& x, const Vec& p, Vec& out) const = 0;
    virtual void hess_pp(const Vec& x, const Vec& p, Mat& out) const = 0;

    /// d^2 H / dx_i dx_j, central differences of grad_x by default.
    virtual void hess_xx(const Vec& x, const Vec& p, Mat& out) const;
    /// d^2 H / dp_i dx_j, central differences of grad_p by default.
    virtual void hess_px(const Vec& x, const Vec& p, Mat& out) const;

    /// Closed-form Fenchel conjugate when the subclass has one.
    virtual bool closed_form_legendre(const Vec& /*x*/, const Vec& /*v*/, LagrangianValue& /*out*/) const {
        return false;
    }
};

struct EvalBundle {
    double h;
    Vec h_x, h_p;
    Mat h_pp;
};

/// Evaluates H and its contract derivatives, rejecting non-finite input and
/// output with a domain error.
EvalBundle eval_hamiltonian(const Hamiltonian& h, const Vec& x, const Vec& p);

/**
 * Fenchel conjugate L(x, v) = max_p <p, v> - H(x, p) with its maximizer.
 * Uses the closed form when the Hamiltonian provides one, otherwise solves
 * H_p(x, p) = v by damped Newton from p = 0 (max 100 iterations, residual
 * tolerance 1e-10); non-convergence raises ConvergenceError.
 */
LagrangianValue legendre_transform(const Hamiltonian& h, const Vec& x, const Vec& v);

// ---------------------------------------------------------------------------

/// H(x, p) = 1/2 |p + d|^2 + V(x) + offset in one dimension, the form taken
/// by every registered example. H_pp is identically 1.
class MechanicalHamiltonian final : public Hamiltonian {
  public:
    MechanicalHamiltonian(double drift, TrigPoly potential, double offset = 0.0)
        : drift_(drift), potential_(std::move(potential)), offset_(offset) {}

    int dim() const override { return 1; }
    double period() const override { return potential_.period(); }

    // scalar fast path
    double h(double x, double p) const {
        const double q = p + drift_;
        return 0.5 * q * q + potential_.value(x) + offset_;
    }
    double hx(double x) const { return potential_.deriv(x); }
    double hp(double p) const { return p + drift_; }
    double vpp(double x) const { return potential_.deriv2(x); }
    /// L(x, v) = 1/2 v^2 - d v - V(x) - offset, maximizer p = v - d.
    double lagrangian(double x, double v) const {
        return 0.5 * v * v - drift_ * v - potential_.value(x) - offset_;
    }

    double drift() const { return drift_; }
    const TrigPoly& potential() const { return potential_; }
    double offset() const { return offset_; }

    double value(const Vec& x, const Vec& p) const override { return h(x[0], p[0]); }
    void grad_x(const Vec& x, const Vec&, Vec& out) const override {
        out.assign(1, hx(x[0]));
    }
    void grad_p(const Vec&, const Vec& p, Vec& out) const override {
        out.assign(1, hp(p[0]));
    }
    void hess_pp(const Vec&, const Vec&, Mat& out) const override {
        out = Mat::identity(1);
    }
    void hess_xx(const Vec& x, const Vec&, Mat& out) const override {
        out = Mat(1, 1);
        out(0, 0) = vpp(x[0]);
    }
    void hess_px(const Vec&, const Vec&, Mat& out) const override { out = Mat(1, 1); }

    bool closed_form_legendre(const Vec& x, const Vec& v, LagrangianValue& out) const override {
        out.value = lagrangian(x[0], v[0]);
        out.maximizer_p.assign(1, v[0] - drift_);
        return true;
    }

  private:
    double drift_;
    TrigPoly potential_;
    double offset_;
};

/// H(x, p) = omega0 * p. Degenerate (H_pp = 0); only used as a test system
/// for the flow and the invariant-splitting machinery, where the exact
/// solution x(t) = x0 + omega0 t, p(t) = e^{-lambda t} p0 is known.
class RigidRotor final : public Hamiltonian {
  public:
    explicit RigidRotor(double omega0) : omega0_(omega0) {}

    int dim() const override { return 1; }
    double omega0() const { return omega0_; }

    double value(const Vec&, const Vec& p) const override { return omega0_ * p[0]; }
    void grad_x(const Vec&, const Vec&, Vec& out) const override { out.assign(1, 0.0); }
    void grad_p(const Vec&, const Vec&, Vec& out) const override { out.assign(1, omega0_); }
    void hess_pp(const Vec&, const Vec&, Mat& out) const override { out = Mat(1, 1); }
    void hess_xx(const Vec&, const Vec&, Mat& out) const override { out = Mat(1, 1); }
    void hess_px(const Vec&, const Vec&, Mat& out) const override { out = Mat(1, 1); }

  private:
    double omega0_;
};

/// Pure potential term W(x), used as a perturbation H + eps * H1. Not a
/// Tonelli Hamiltonian on its own.
class PotentialPerturbation final : public Hamiltonian {
  public:
    explicit PotentialPerturbation(TrigPoly w) : w_(std::move(w)) {}

    int dim() const override { return 1; }
    double period() const override { return w_.period(); }
    const TrigPoly& potential() const { return w_; }

    double value(const Vec& x, const Vec&) const override { return w_.value(x[0]); }
    void grad_x(const Vec& x, const Vec&, Vec& out) const override { out.assign(1, w_.deriv(x[0])); }
    void grad_p(const Vec&, const Vec&, Vec& out) const override { out.assign(1, 0.0); }
    void hess_pp(const Vec&, const Vec&, Mat& out) const override { out = Mat(1, 1); }
    void hess_xx(const Vec& x, const Vec&, Mat& out) const override {
        out = Mat(1, 1);
        out(0, 0) = w_.deriv2(x[0]);
    }
    void hess_px(const Vec&, const Vec&, Mat& out) const override { out = Mat(1, 1); }

  private:
    TrigPoly w_;
};

/// base + eps * perturbation for Hamiltonians without a common closed form.
class ScaledSumHamiltonian final : public Hamiltonian {
  public:
    ScaledSumHamiltonian(std::shared_ptr<const Hamiltonian> base,
                         std::shared_ptr<const Hamiltonian> pert, double eps);

    int dim() const override { return base_->dim(); }
    double period() const override { return base_->period(); }

    double value(const Vec& x, const Vec& p) const override;
    void grad_x(const Vec& x, const Vec& p, Vec& out) const override;
    void grad_p(const Vec& x, const Vec& p, Vec& out) const override;
    void hess_pp(const Vec& x, const Vec& p, Mat& out) const override;
    void hess_xx(const Vec& x, const Vec& p, Mat& out) const override;
    void hess_px(const Vec& x, const Vec& p, Mat& out) const override;

  private:
    std::shared_ptr<const Hamiltonian> base_, pert_;
    double eps_;
};

// ---------------------------------------------------------------------------

struct TonelliSampleSpec {
    int x_samples = 64;
    std::vector<double> radii = {1.0, 2.0, 4.0, 8.0, 16.0};
    int directions = 8;  // covector directions per radius (n >= 2); +/- for n = 1
};

struct TonelliReport {
    double min_eigenvalue = 0.0;         // of H_pp over all samples
    std::vector<double> growth;          // min H/|p| at each radius
    bool positive_definite = false;
    bool superlinear_trend = false;      // growth strictly increasing
    bool pass = false;
};

/// Samples H_pp eigenvalues and the growth of H/|p| on a radius schedule.
TonelliReport tonelli_check(const Hamiltonian& h, const TonelliSampleSpec& spec = {});

}  // namespace kamlab::model
