#include "kamlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kamlab::solver {

double GridFunction::min_value() const { return *std::min_element(v_.begin(), v_.end()); }

double GridFunction::max_value() const { return *std::max_element(v_.begin(), v_.end()); }

double GridFunction::sup_diff(const GridFunction& other) const {
    if (!(grid_ == other.grid_)) throw DomainError("sup_diff: grid mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) m = std::max(m, std::abs(v_[i] - other.v_[i]));
    return m;
}

std::vector<double> GridFunction::centered_derivative() const {
    const int n = grid_.size();
    std::vector<double> d(n);
    const double inv2dx = 1.0 / (2.0 * grid_.dx());
    for (int i = 0; i < n; ++i) {
        const int ip = i + 1 == n ? 0 : i + 1;
        const int im = i == 0 ? n - 1 : i - 1;
        d[i] = (v_[ip] - v_[im]) * inv2dx;
    }
    return d;
}

void GridFunction::require_finite(const char* what) const {
    for (std::size_t i = 0; i < v_.size(); ++i)
        if (!std::isfinite(v_[i]))
            throw DomainError(std::string(what) + ": non-finite value at grid index " + std::to_string(i));
}

}  // namespace kamlab::solver
