#include "kamlab/trig_poly.hpp"

#include <cmath>

namespace kamlab::model {

TrigPoly::TrigPoly(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs, double period)
    : cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)), period_(period) {
    if (period_ <= 0.0) throw DomainError("TrigPoly: period must be positive");
    if (cos_.empty()) cos_.push_back(0.0);
    degree_ = static_cast<int>(std::max(cos_.size() - 1, sin_.size()));
    cos_.resize(degree_ + 1, 0.0);
    sin_.resize(degree_, 0.0);
}

// Harmonics are generated by the angle-addition recurrence, so each call
// costs a single sin/cos pair regardless of the degree.
double TrigPoly::value(double x) const {
    const double w = kTwoPi / period_;
    const double a = w * wrap(x, period_);
    const double c1 = std::cos(a), s1 = std::sin(a);
    double ck = c1, sk = s1;
    double s = cos_[0];
    for (int k = 1; k <= degree_; ++k) {
        s += cos_[k] * ck + sin_[k - 1] * sk;
        const double cn = ck * c1 - sk * s1;
        sk = sk * c1 + ck * s1;
        ck = cn;
    }
    return s;
}

double TrigPoly::deriv(double x) const {
    const double w = kTwoPi / period_;
    const double a = w * wrap(x, period_);
    const double c1 = std::cos(a), s1 = std::sin(a);
    double ck = c1, sk = s1;
    double s = 0.0;
    for (int k = 1; k <= degree_; ++k) {
        s += k * w * (-cos_[k] * sk + sin_[k - 1] * ck);
        const double cn = ck * c1 - sk * s1;
        sk = sk * c1 + ck * s1;
        ck = cn;
    }
    return s;
}

double TrigPoly::deriv2(double x) const {
    const double w = kTwoPi / period_;
    const double a = w * wrap(x, period_);
    const double c1 = std::cos(a), s1 = std::sin(a);
    double ck = c1, sk = s1;
    double s = 0.0;
    for (int k = 1; k <= degree_; ++k) {
        s -= k * w * k * w * (cos_[k] * ck + sin_[k - 1] * sk);
        const double cn = ck * c1 - sk * s1;
        sk = sk * c1 + ck * s1;
        ck = cn;
    }
    return s;
}

TrigPoly TrigPoly::combine(double a, const TrigPoly& p, double b, const TrigPoly& q) {
    if (p.period_ != q.period_) throw DomainError("TrigPoly::combine: period mismatch");
    const int deg = std::max(p.degree_, q.degree_);
    std::vector<double> c(deg + 1, 0.0), s(deg, 0.0);
    for (int k = 0; k <= deg; ++k) {
        if (k <= p.degree_) c[k] += a * p.cos_[k];
        if (k <= q.degree_) c[k] += b * q.cos_[k];
    }
    for (int k = 1; k <= deg; ++k) {
        if (k <= p.degree_) s[k - 1] += a * p.sin_[k - 1];
        if (k <= q.degree_) s[k - 1] += b * q.sin_[k - 1];
    }
    return TrigPoly(std::move(c), std::move(s), p.period_);
}

}  // namespace kamlab::model
