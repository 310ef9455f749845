#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kamlab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Damping index used by all registered example systems (1/sqrt(2)).
inline constexpr double kExampleLambda = 0.70710678118654752440;

using Vec = std::vector<double>;

/// Row-major dense matrix for the small (2n x 2n) tangent blocks.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

Mat operator*(const Mat& lhs, const Mat& rhs);
double det(const Mat& m);

// ---------------------------------------------------------------------------
// Error types. The CLI maps ConfigError to exit code 2 and the numerical
// failures (ConvergenceError, DivergenceError, VelocityBoundError,
// ConsistencyError) to exit code 1.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    double last_residual;
    ConvergenceError(const std::string& msg, double residual)
        : Error(msg + " (last residual " + std::to_string(residual) + ")"),
          last_residual(residual) {}
};

struct DivergenceError : Error {
    double t_reached;
    DivergenceError(const std::string& msg, double t)
        : Error(msg + " (at t = " + std::to_string(t) + ")"), t_reached(t) {}
};

struct ConsistencyError : Error {
    using Error::Error;
};

/// Raised when a variational argmin sits on the velocity search boundary,
/// which signals that v_max is too small for the system at hand.
struct VelocityBoundError : Error {
    long grid_index;
    double location;
    VelocityBoundError(long index, double x)
        : Error("velocity bound active at grid point " + std::to_string(index) +
                " (x = " + std::to_string(x) + "); increase v_max"),
          grid_index(index), location(x) {}
};

// ---------------------------------------------------------------------------
// Small numeric helpers.
// ---------------------------------------------------------------------------

/// Reduce x to [0, period).
inline double wrap(double x, double period) {
    double y = std::fmod(x, period);
    return y < 0.0 ? y + period : y;
}

/// Minimal signed representative of x modulo period, in (-period/2, period/2].
inline double wrap_signed(double x, double period) {
    double y = std::fmod(x, period);
    if (y > 0.5 * period) y -= period;
    if (y <= -0.5 * period) y += period;
    return y;
}

/// Pairwise summation; keeps rounding error ~ O(log n) for the long
/// trapezoid/average reductions used by the verification routines.
double pairwise_sum(std::span<const double> v);

/// Mean of a sample vector via pairwise summation.
inline double stable_mean(std::span<const double> v) {
    return v.empty() ? 0.0 : pairwise_sum(v) / static_cast<double>(v.size());
}

/// Periodic Catmull-Rom interpolation on a uniform grid over [0, period).
class PeriodicCubic {
  public:
    PeriodicCubic() = default;
    PeriodicCubic(std::vector<double> values, double period)
        : v_(std::move(values)), period_(period) {}

    double operator()(double x) const {
        const int n = static_cast<int>(v_.size());
        const double t = wrap(x, period_) / period_ * n;
        int i1 = static_cast<int>(std::floor(t));
        const double s = t - i1;
        i1 %= n;
        const int i0 = (i1 + n - 1) % n;
        const int i2 = (i1 + 1) % n;
        const int i3 = (i1 + 2) % n;
        const double f0 = v_[i0], f1 = v_[i1], f2 = v_[i2], f3 = v_[i3];
        return 0.5 * (2.0 * f1 + (-f0 + f2) * s + (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) * s * s +
                      (-f0 + 3.0 * f1 - 3.0 * f2 + f3) * s * s * s);
    }

    const std::vector<double>& values() const { return v_; }
    double period() const { return period_; }

  private:
    std::vector<double> v_;
    double period_ = kTwoPi;
};

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 1.0;
};

/// Ordinary least squares y ~ intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace kamlab
