#pragma once

#include <functional>
#include <vector>

#include "kamlab/common.hpp"

namespace kamlab::solver {

/// Uniform periodic grid on the circle [0, period). Indexing wraps modulo N.
struct PeriodicGrid {
    int points = 256;
    double period = kTwoPi;

    PeriodicGrid() = default;
    PeriodicGrid(int n_points, double per = kTwoPi) : points(n_points), period(per) {
        if (points < 16) throw ConfigError("PeriodicGrid: need at least 16 points");
        if (period <= 0.0) throw ConfigError("PeriodicGrid: period must be positive");
    }

    double dx() const { return period / points; }
    double node(int i) const { return i * dx(); }
    int size() const { return points; }

    bool operator==(const PeriodicGrid&) const = default;
};

/// Grid-sampled function on the torus with periodic linear interpolation.
class GridFunction {
  public:
    GridFunction() = default;
    GridFunction(PeriodicGrid g, double fill = 0.0) : grid_(g), v_(g.size(), fill) {}
    GridFunction(PeriodicGrid g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
        if (static_cast<int>(v_.size()) != grid_.size())
            throw DomainError("GridFunction: value count does not match the grid");
    }

    static GridFunction sample(PeriodicGrid g, const std::function<double(double)>& f) {
        GridFunction u(g);
        for (int i = 0; i < g.size(); ++i) u.v_[i] = f(g.node(i));
        return u;
    }

    const PeriodicGrid& grid() const { return grid_; }
    int size() const { return grid_.size(); }
    double dx() const { return grid_.dx(); }

    double& operator[](int i) { return v_[i]; }
    double operator[](int i) const { return v_[i]; }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    /// Periodic linear interpolation; x may be lifted arbitrarily.
    double interp(double x) const {
        const int n = grid_.size();
        const double t = wrap(x, grid_.period) / grid_.dx();
        int i0 = static_cast<int>(t);
        if (i0 >= n) i0 = n - 1;  // wrap(x) < period, guard fp edge
        const double s = t - i0;
        const int i1 = i0 + 1 == n ? 0 : i0 + 1;
        return v_[i0] * (1.0 - s) + v_[i1] * s;
    }

    double min_value() const;
    double max_value() const;
    double sup_diff(const GridFunction& other) const;

    /// Centered difference derivative samples (periodic).
    std::vector<double> centered_derivative() const;

    void require_finite(const char* what) const;

  private:
    PeriodicGrid grid_;
    std::vector<double> v_;
};

}  // namespace kamlab::solver
