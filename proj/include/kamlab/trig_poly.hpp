#pragma once

#include <vector>

#include "kamlab/common.hpp"

namespace kamlab::model {

/**
 * Real trigonometric polynomial on a circle of given circumference:
 *
 *   P(x) = c0 + sum_{k=1..deg} [ c_k cos(k w x) + s_k sin(k w x) ],
 *
 * with w = 2*pi/period. Arguments are wrapped before evaluation, so the
 * function is periodic for lifted inputs of any size.
 */
class TrigPoly {
  public:
    TrigPoly() : cos_{0.0} {}

    /// cos_coeffs[k] multiplies cos(k w x) (index 0 is the constant term);
    /// sin_coeffs[k-1] multiplies sin(k w x).
    TrigPoly(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs, double period = kTwoPi);

    double value(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;

    int degree() const { return degree_; }
    double period() const { return period_; }
    const std::vector<double>& cos_coeffs() const { return cos_; }
    const std::vector<double>& sin_coeffs() const { return sin_; }

    /// a*P + b*Q (termwise; periods must match).
    static TrigPoly combine(double a, const TrigPoly& p, double b, const TrigPoly& q);

    TrigPoly& add_constant(double c) {
        cos_[0] += c;
        return *this;
    }

    /// Mean over one period (= constant coefficient).
    double mean() const { return cos_[0]; }

  private:
    std::vector<double> cos_;  // size degree_ + 1
    std::vector<double> sin_;  // size degree_
    double period_ = kTwoPi;
    int degree_ = 0;
};

}  // namespace kamlab::model
