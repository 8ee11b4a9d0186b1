#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace diffsim {

// Multi-directional forward-mode dual number: a primal value plus a dense
// tangent vector carrying one directional derivative per differentiated
// parameter. An empty tangent vector means "all tangents zero" so that
// constants cost nothing regardless of the seed dimension.
class Dual {
 public:
  Dual() = default;
  Dual(double value) : v_(value) {}  // NOLINT: implicit constant lift
  Dual(double value, std::vector<double> tangent)
      : v_(value), t_(std::move(tangent)) {}

  // Seeds parameter `index` out of `dim` with tangent 1.
  static Dual seeded(double value, std::size_t index, std::size_t dim) {
    std::vector<double> t(dim, 0.0);
    t[index] = 1.0;
    return Dual(value, std::move(t));
  }

  double value() const { return v_; }
  const std::vector<double>& tangent() const { return t_; }
  double tangent(std::size_t i) const { return i < t_.size() ? t_[i] : 0.0; }

  Dual operator-() const {
    Dual r(-v_, t_);
    for (auto& x : r.t_) x = -x;
    return r;
  }

  Dual& operator+=(const Dual& o) {
    v_ += o.v_;
    accumulate(o.t_, 1.0);
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v_ -= o.v_;
    accumulate(o.t_, -1.0);
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    // product rule; scale own tangent first, then add o's
    for (auto& x : t_) x *= o.v_;
    accumulate(o.t_, v_);
    v_ *= o.v_;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v_;
    for (auto& x : t_) x *= inv;
    accumulate(o.t_, -v_ * inv * inv);
    v_ *= inv;
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }

  friend bool operator<(const Dual& a, const Dual& b) { return a.v_ < b.v_; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.v_ > b.v_; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.v_ <= b.v_; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.v_ >= b.v_; }
  friend bool operator==(const Dual& a, const Dual& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Dual& a, const Dual& b) { return a.v_ != b.v_; }

  // f(x) with derivative df applied by the chain rule.
  friend Dual chain(const Dual& x, double fx, double dfx) {
    Dual r(fx, x.t_);
    for (auto& t : r.t_) t *= dfx;
    return r;
  }

  friend Dual chain2(const Dual& x, const Dual& y, double f, double dfx,
                     double dfy) {
    Dual r(f, x.t_);
    for (auto& t : r.t_) t *= dfx;
    r.accumulate(y.t_, dfy);
    return r;
  }

 private:
  void accumulate(const std::vector<double>& t, double scale) {
    if (t.empty()) return;
    if (t_.size() < t.size()) t_.resize(t.size(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) t_[i] += scale * t[i];
  }

  double v_ = 0.0;
  std::vector<double> t_;
};

inline Dual sin(const Dual& x) {
  return chain(x, std::sin(x.value()), std::cos(x.value()));
}
inline Dual cos(const Dual& x) {
  return chain(x, std::cos(x.value()), -std::sin(x.value()));
}
inline Dual tanh(const Dual& x) {
  const double t = std::tanh(x.value());
  return chain(x, t, 1.0 - t * t);
}
inline Dual exp(const Dual& x) {
  const double e = std::exp(x.value());
  return chain(x, e, e);
}
inline Dual log(const Dual& x) {
  return chain(x, std::log(x.value()), 1.0 / x.value());
}
// Subgradient 0 at the origin for both sqrt and abs.
inline Dual sqrt(const Dual& x) {
  const double s = std::sqrt(x.value());
  return chain(x, s, x.value() > 0.0 ? 0.5 / s : 0.0);
}
inline Dual abs(const Dual& x) {
  const double s = x.value() > 0.0 ? 1.0 : (x.value() < 0.0 ? -1.0 : 0.0);
  return chain(x, std::abs(x.value()), s);
}
inline Dual pow(const Dual& x, const Dual& y) {
  const double f = std::pow(x.value(), y.value());
  const double dfx = y.value() * std::pow(x.value(), y.value() - 1.0);
  const double dfy = x.value() > 0.0 ? f * std::log(x.value()) : 0.0;
  return chain2(x, y, f, dfx, dfy);
}
inline Dual pow(const Dual& x, double y) {
  return chain(x, std::pow(x.value(), y),
               y * std::pow(x.value(), y - 1.0));
}
inline Dual atan2(const Dual& y, const Dual& x) {
  const double d = x.value() * x.value() + y.value() * y.value();
  return chain2(y, x, std::atan2(y.value(), x.value()), x.value() / d,
                -y.value() / d);
}

// Branchless conditional: a when c > 0, b otherwise. The tangent follows the
// taken branch only.
inline Dual select(const Dual& c, const Dual& a, const Dual& b) {
  return c.value() > 0.0 ? a : b;
}

inline double primal(const Dual& x) { return x.value(); }

}  // namespace diffsim
