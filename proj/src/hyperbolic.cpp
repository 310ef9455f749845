#include "kamlab/hyperbolic.hpp"

#include <cmath>
#include <complex>
#include <limits>

namespace kamlab::hyperbolic {

namespace {

using cplx = std::complex<double>;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT (inverse includes the 1/n normalization).
void fft(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw DomainError("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 1.0 : -1.0) * kTwoPi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& z : a) z /= static_cast<double>(n);
}

// signed frequency of DFT bin j
long bin_freq(std::size_t j, std::size_t n) {
    return j <= n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
}

// Exact shift of the trigonometric interpolant: (shift_w f)(x) = f(x + w).
std::vector<double> spectral_shift(const std::vector<double>& f, double shift, double period) {
    const std::size_t n = f.size();
    std::vector<cplx> a(f.begin(), f.end());
    fft(a, false);
    for (std::size_t j = 0; j < n; ++j) {
        const double phase = bin_freq(j, n) * kTwoPi / period * shift;
        a[j] *= cplx(std::cos(phase), std::sin(phase));
    }
    fft(a, true);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = a[j].real();
    return out;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Trigonometric interpolant of uniform periodic samples; evaluation of the
// partial Fourier sum is spectrally accurate for smooth data, which keeps the
// torus-representation error far below the distances being measured.
class TrigInterpolant {
  public:
    TrigInterpolant(const std::vector<double>& samples, double period)
        : period_(period), coef_(samples.begin(), samples.end()) {
        fft(coef_, false);
        for (auto& c : coef_) c /= static_cast<double>(samples.size());
    }

    double operator()(double x) const {
        const std::size_t n = coef_.size();
        const double base = kTwoPi / period_ * x;
        double acc = coef_[0].real();
        for (std::size_t j = 1; j < n / 2; ++j) {
            const double ang = static_cast<double>(j) * base;
            // bins j and n-j are conjugate for real data
            acc += 2.0 * (coef_[j].real() * std::cos(ang) - coef_[j].imag() * std::sin(ang));
        }
        if (n % 2 == 0) acc += coef_[n / 2].real() * std::cos(static_cast<double>(n / 2) * base);
        return acc;
    }

  private:
    double period_;
    std::vector<cplx> coef_;
};

// sine of the angle between two 2-vectors
double sin_angle(const std::array<double, 2>& u, const std::array<double, 2>& v) {
    const double nu = std::hypot(u[0], u[1]);
    const double nv = std::hypot(v[0], v[1]);
    if (nu == 0.0 || nv == 0.0) return 1.0;
    return std::abs(u[0] * v[1] - u[1] * v[0]) / (nu * nv);
}

std::array<double, 2> apply2(const std::array<double, 4>& m, const std::array<double, 2>& v) {
    return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
}

}  // namespace

TorusSampling sample_torus(const flow::DampedSystem& sys, const model::TrigPoly& graph, int n_theta) {
    TorusSampling t;
    t.period = sys.period();
    t.theta.resize(n_theta);
    t.eta.resize(n_theta);
    t.eta_prime.resize(n_theta);
    for (int i = 0; i < n_theta; ++i) {
        t.theta[i] = t.period * i / n_theta;
        t.eta[i] = graph.value(t.theta[i]);
        t.eta_prime[i] = graph.deriv(t.theta[i]);
    }
    const auto rot = flow::rotation_number(sys, graph);
    t.omega = rot.omega;
    return t;
}

MonodromyResult time1_monodromy(const flow::DampedSystem& sys, const TorusSampling& torus,
                                const flow::StepSpec& spec, double invariance_threshold) {
    MonodromyResult out;
    out.samples.resize(torus.size());
    const PeriodicCubic eta_prime(torus.eta_prime, torus.period);
    const double target_det = std::exp(-sys.lambda);

    for (int i = 0; i < torus.size(); ++i) {
        const auto traj = flow::tangent_flow(sys, torus.theta[i], torus.eta[i], 1.0, spec);
        MonodromySample& s = out.samples[i];
        s.theta = torus.theta[i];
        s.landing_x = traj.final_x()[0];
        s.landing_p = traj.final_p()[0];
        const Mat& g = traj.final_tangent();
        s.dphi = {g(0, 0), g(0, 1), g(1, 0), g(1, 1)};
        s.det = traj.det.back();

        const std::array<double, 2> dk{1.0, eta_prime(torus.theta[i])};
        const std::array<double, 2> dk_land{1.0, eta_prime(s.landing_x)};
        s.transport_residual = sin_angle(apply2(s.dphi, dk), dk_land);

        out.transport_residual_sup = std::max(out.transport_residual_sup, s.transport_residual);
        out.det_rel_err_sup =
            std::max(out.det_rel_err_sup, std::abs(s.det - target_det) / target_det);
    }
    if (out.transport_residual_sup > invariance_threshold)
        throw DomainError("time1_monodromy: torus not invariant enough (transport residual " +
                          std::to_string(out.transport_residual_sup) + ")");
    return out;
}

std::vector<double> solve_cohomological(const std::vector<double>& s_samples, double lambda,
                                        double omega, double period) {
    if (lambda <= 0.0) throw DomainError("solve_cohomological: lambda must be positive");
    const std::size_t n = s_samples.size();
    if (!is_power_of_two(n)) throw DomainError("solve_cohomological: grid size must be a power of two");

    // spectral solve
    std::vector<cplx> a(s_samples.begin(), s_samples.end());
    fft(a, false);
    const double decay = std::exp(-lambda);
    for (std::size_t j = 0; j < n; ++j) {
        const double phase = bin_freq(j, n) * kTwoPi / period * omega;
        const cplx denom = 1.0 - decay * cplx(std::cos(phase), std::sin(phase));
        a[j] = -a[j] / denom;
    }
    fft(a, true);
    std::vector<double> spectral(n);
    for (std::size_t j = 0; j < n; ++j) spectral[j] = a[j].real();

    // fixed-point iteration B <- e^{-lambda} B o rho_omega - S
    std::vector<double> b(n, 0.0);
    for (int it = 0; it < 4000; ++it) {
        std::vector<double> shifted = spectral_shift(b, omega, period);
        double change = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double next = decay * shifted[j] - s_samples[j];
            change = std::max(change, std::abs(next - b[j]));
            b[j] = next;
        }
        if (change <= 1e-12) break;
    }

    const double gap = sup_diff(spectral, b);
    if (gap > 1e-10)
        throw ConsistencyError("solve_cohomological: spectral and iterative solutions differ by " +
                               std::to_string(gap));
    return spectral;
}

SplittingData build_splitting(const flow::DampedSystem& sys, const TorusSampling& torus,
                              const flow::StepSpec& spec) {
    if (sys.lambda <= 0.0) throw DomainError("build_splitting: lambda must be positive");
    SplittingData d;
    d.torus = torus;
    d.monodromy = time1_monodromy(sys, torus, spec);
    const int n = torus.size();
    const PeriodicCubic eta_prime(torus.eta_prime, torus.period);

    d.landing.resize(n);
    d.gprime.resize(n);
    d.shear.resize(n);
    d.stable_mult.resize(n);
    d.dk.resize(n);
    d.vdir.resize(n);
    d.frame_det_min = std::numeric_limits<double>::infinity();
    d.ec_residual = d.monodromy.transport_residual_sup;

    auto frame_at = [&](double x) {
        const double pp = eta_prime(x);
        const std::array<double, 2> dk{1.0, pp};
        // V = J^T DK / |DK|^2 with J = [[0,-1],[1,0]]
        const double n2 = 1.0 + pp * pp;
        const std::array<double, 2> v{pp / n2, -1.0 / n2};
        return std::pair{dk, v};
    };

    for (int i = 0; i < n; ++i) {
        const auto& s = d.monodromy.samples[i];
        d.landing[i] = s.landing_x;
        const auto [dk0, v0] = frame_at(torus.theta[i]);
        const auto [dk1, v1] = frame_at(s.landing_x);
        d.dk[i] = dk0;
        d.vdir[i] = v0;
        const double det0 = dk0[0] * v0[1] - dk0[1] * v0[0];
        d.frame_det_min = std::min(d.frame_det_min, std::abs(det0));

        // solve M(g theta) [c, rho]^T = DPhi DK, M(g theta) [s, a]^T = DPhi V
        const double det1 = dk1[0] * v1[1] - dk1[1] * v1[0];
        auto solve_frame = [&](const std::array<double, 2>& rhs) {
            const double c0 = (rhs[0] * v1[1] - rhs[1] * v1[0]) / det1;
            const double c1 = (dk1[0] * rhs[1] - dk1[1] * rhs[0]) / det1;
            return std::pair{c0, c1};
        };
        const auto [c, rho] = solve_frame(apply2(s.dphi, dk0));
        const auto [sh, am] = solve_frame(apply2(s.dphi, v0));
        (void)rho;  // the orthogonal defect is already reported as ec_residual
        d.gprime[i] = c;
        d.shear[i] = sh;
        d.stable_mult[i] = am;
    }

    // Fixed-point solve of a(theta) B(g theta) - c(theta) B(theta) = -s(theta):
    //   B(theta) <- [a(theta) B(g theta) + s(theta)] ... derived from the
    // requirement DPhi (DK B + V) parallel to DK(g) B(g) + V(g):
    //   B(g theta) = (c(theta) B(theta) + s(theta)) / a(theta)
    //   =>  B(theta) = (a(theta) B(g theta) - s(theta)) / c(theta).
    std::vector<double> b(n, 0.0);
    double change = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 4000 && change > 1e-13; ++it) {
        PeriodicCubic interp(b, torus.period);
        change = 0.0;
        std::vector<double> next(n);
        for (int i = 0; i < n; ++i) {
            next[i] = (d.stable_mult[i] * interp(d.landing[i]) - d.shear[i]) / d.gprime[i];
            change = std::max(change, std::abs(next[i] - b[i]));
        }
        b = std::move(next);
    }
    d.bcoef = b;

    d.es.resize(n);
    for (int i = 0; i < n; ++i) {
        std::array<double, 2> e{d.dk[i][0] * b[i] + d.vdir[i][0], d.dk[i][1] * b[i] + d.vdir[i][1]};
        const double nrm = std::hypot(e[0], e[1]);
        d.es[i] = {e[0] / nrm, e[1] / nrm};
    }
    d.es_residual = splitting_residual(sys, d, d.bcoef);
    return d;
}

double splitting_residual(const flow::DampedSystem& sys, const SplittingData& d,
                          const std::vector<double>& bcoef) {
    if (sys.lambda <= 0.0) throw DomainError("splitting_residual: lambda must be positive");
    const int n = d.torus.size();
    if (static_cast<int>(bcoef.size()) != n)
        throw DomainError("splitting_residual: B sample count mismatch");
    const PeriodicCubic eta_prime(d.torus.eta_prime, d.torus.period);
    const PeriodicCubic b_interp(bcoef, d.torus.period);

    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const std::array<double, 2> e0{d.dk[i][0] * bcoef[i] + d.vdir[i][0],
                                       d.dk[i][1] * bcoef[i] + d.vdir[i][1]};
        const double land = d.landing[i];
        const double pp = eta_prime(land);
        const double n2 = 1.0 + pp * pp;
        const double bl = b_interp(land);
        const std::array<double, 2> e1{1.0 * bl + pp / n2, pp * bl - 1.0 / n2};
        worst = std::max(worst, sin_angle(apply2(d.monodromy.samples[i].dphi, e0), e1));
    }
    return worst;
}

ExponentReport transverse_exponent(const flow::DampedSystem& sys, const TorusSampling& torus,
                                   const EnsembleSpec& spec) {
    ExponentReport rep;
    const TrigInterpolant eta(torus.eta, torus.period);
    const TrigInterpolant eta_prime(torus.eta_prime, torus.period);

    auto graph_distance = [&](double x, double p) {
        const double pp = eta_prime(x);
        return std::abs(p - eta(x)) / std::sqrt(1.0 + pp * pp);
    };

    const int count = std::min(spec.count, torus.size());
    const int stride = torus.size() / count;
    std::vector<double> xs, ps;
    for (int i = 0; i < count; ++i) {
        const double th = torus.theta[i * stride];
        const double pp = eta_prime(th);
        const double nrm = std::sqrt(1.0 + pp * pp);
        xs.push_back(th - spec.delta0 * pp / nrm);
        ps.push_back(torus.eta[i * stride] + spec.delta0 / nrm);
    }

    const long per_sample = std::max<long>(1, std::lround(spec.sample_dt / spec.step.dt));
    const long nsamples = std::lround(spec.horizon / spec.sample_dt);
    flow::StepSpec leg = spec.step;
    leg.sample_stride = std::numeric_limits<int>::max();  // endpoints only

    rep.times.push_back(0.0);
    double d0 = 0.0;
    for (int i = 0; i < count; ++i) d0 = std::max(d0, graph_distance(wrap(xs[i], torus.period), ps[i]));
    rep.dists.push_back(d0);

    for (long k = 1; k <= nsamples; ++k) {
        double dmax = 0.0;
        for (int i = 0; i < count; ++i) {
            const auto traj = flow::flow_map(sys, xs[i], ps[i], per_sample * spec.step.dt, leg);
            xs[i] = traj.final_x()[0];
            ps[i] = traj.final_p()[0];
            dmax = std::max(dmax, graph_distance(wrap(xs[i], torus.period), ps[i]));
        }
        rep.times.push_back(k * per_sample * spec.step.dt);
        rep.dists.push_back(dmax);
    }

    double peak = 0.0;
    for (double d : rep.dists) peak = std::max(peak, d);
    if (peak <= 1e-8) {
        rep.on_torus = true;
        return rep;
    }

    std::vector<double> ts, ls;
    for (std::size_t i = 0; i < rep.dists.size(); ++i)
        if (rep.dists[i] > spec.noise_floor) {
            ts.push_back(rep.times[i]);
            ls.push_back(std::log(rep.dists[i]));
        }
    if (ts.size() < 3) throw DomainError("transverse_exponent: too few usable distance samples");
    const LineFit fit = fit_line(ts, ls);
    rep.exponent = fit.slope;
    rep.r_squared = fit.r_squared;
    rep.escaped = rep.dists.back() > 2.0 * rep.dists.front() && fit.slope > 0.0;
    return rep;
}

}  // namespace kamlab::hyperbolic
