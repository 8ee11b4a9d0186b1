#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "diffsim/error.hpp"

namespace diffsim {

enum class OpKind : std::uint8_t {
  kInput,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kSin,
  kCos,
  kTanh,
  kExp,
  kLog,
  kSqrt,
  kAbs,
  kPow,
  kAtan2,
  kSelect,
};

// Append-only reverse-mode tape. Local partials are computed at record time,
// so the backward sweep is a single reverse pass over the node list.
// A tape is confined to one thread; see TapeScope.
class Tape {
 public:
  struct Node {
    std::int32_t a;
    std::int32_t b;
    double da;
    double db;
  };

  std::int32_t record(OpKind kind, std::int32_t a, double da, std::int32_t b,
                      double db) {
    nodes_.push_back({a, b, da, db});
    kinds_.push_back(kind);
    if (kind == OpKind::kInput) ++input_count_;
    return static_cast<std::int32_t>(nodes_.size()) - 1;
  }

  std::size_t size() const { return nodes_.size(); }
  // Elementary operations recorded, input registrations excluded.
  std::size_t operation_count() const { return nodes_.size() - input_count_; }

  void clear() {
    nodes_.clear();
    kinds_.clear();
    adjoints_.clear();
    input_count_ = 0;
  }

  OpKind kind(std::int32_t i) const { return kinds_[static_cast<std::size_t>(i)]; }

  // Seeds `output` with adjoint 1 and sweeps backward. Nodes unreachable from
  // the output keep adjoint 0.
  void backward(std::int32_t output) {
    if (output < 0 || static_cast<std::size_t>(output) >= nodes_.size())
      throw ArgumentError("tape backward: output index out of range");
    adjoints_.assign(nodes_.size(), 0.0);
    adjoints_[static_cast<std::size_t>(output)] = 1.0;
    for (std::int32_t i = output; i >= 0; --i) {
      const double adj = adjoints_[static_cast<std::size_t>(i)];
      if (adj == 0.0) continue;
      const Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.a >= 0) adjoints_[static_cast<std::size_t>(n.a)] += adj * n.da;
      if (n.b >= 0) adjoints_[static_cast<std::size_t>(n.b)] += adj * n.db;
    }
  }

  double adjoint(std::int32_t i) const {
    if (i < 0 || static_cast<std::size_t>(i) >= adjoints_.size())
      throw ArgumentError("tape adjoint: index out of range");
    return adjoints_[static_cast<std::size_t>(i)];
  }

 private:
  std::vector<Node> nodes_;
  std::vector<OpKind> kinds_;
  std::vector<double> adjoints_;
  std::size_t input_count_ = 0;
};

namespace detail {
inline thread_local Tape* g_active_tape = nullptr;
}

// Installs a tape as the recording target for TapeVar arithmetic on the
// current thread for the lifetime of the scope.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape) : prev_(detail::g_active_tape) {
    detail::g_active_tape = &tape;
  }
  ~TapeScope() { detail::g_active_tape = prev_; }
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* prev_;
};

inline Tape& active_tape() {
  if (!detail::g_active_tape)
    throw ArgumentError("no active tape on this thread (missing TapeScope)");
  return *detail::g_active_tape;
}

// Reverse-mode variable: a primal value plus the index of its tape node.
// Index -1 marks a constant that was never recorded; partials toward
// constants are dropped.
class TapeVar {
 public:
  TapeVar() = default;
  TapeVar(double v) : v_(v) {}  // NOLINT: implicit constant lift

  static TapeVar input(double v) {
    return TapeVar(v, active_tape().record(OpKind::kInput, -1, 0.0, -1, 0.0));
  }

  double value() const { return v_; }
  std::int32_t index() const { return idx_; }
  bool is_constant() const { return idx_ < 0; }

  TapeVar operator-() const {
    if (is_constant()) return TapeVar(-v_);
    return TapeVar(-v_, active_tape().record(OpKind::kNeg, idx_, -1.0, -1, 0.0));
  }

  friend TapeVar operator+(const TapeVar& a, const TapeVar& b) {
    if (a.is_constant() && b.is_constant()) return TapeVar(a.v_ + b.v_);
    return TapeVar(a.v_ + b.v_, active_tape().record(OpKind::kAdd, a.idx_, 1.0,
                                                     b.idx_, 1.0));
  }
  friend TapeVar operator-(const TapeVar& a, const TapeVar& b) {
    if (a.is_constant() && b.is_constant()) return TapeVar(a.v_ - b.v_);
    return TapeVar(a.v_ - b.v_, active_tape().record(OpKind::kSub, a.idx_, 1.0,
                                                     b.idx_, -1.0));
  }
  friend TapeVar operator*(const TapeVar& a, const TapeVar& b) {
    if (a.is_constant() && b.is_constant()) return TapeVar(a.v_ * b.v_);
    return TapeVar(a.v_ * b.v_, active_tape().record(OpKind::kMul, a.idx_, b.v_,
                                                     b.idx_, a.v_));
  }
  friend TapeVar operator/(const TapeVar& a, const TapeVar& b) {
    if (a.is_constant() && b.is_constant()) return TapeVar(a.v_ / b.v_);
    const double inv = 1.0 / b.v_;
    return TapeVar(a.v_ * inv,
                   active_tape().record(OpKind::kDiv, a.idx_, inv, b.idx_,
                                        -a.v_ * inv * inv));
  }

  TapeVar& operator+=(const TapeVar& o) { return *this = *this + o; }
  TapeVar& operator-=(const TapeVar& o) { return *this = *this - o; }
  TapeVar& operator*=(const TapeVar& o) { return *this = *this * o; }
  TapeVar& operator/=(const TapeVar& o) { return *this = *this / o; }

  friend bool operator<(const TapeVar& a, const TapeVar& b) { return a.v_ < b.v_; }
  friend bool operator>(const TapeVar& a, const TapeVar& b) { return a.v_ > b.v_; }
  friend bool operator<=(const TapeVar& a, const TapeVar& b) { return a.v_ <= b.v_; }
  friend bool operator>=(const TapeVar& a, const TapeVar& b) { return a.v_ >= b.v_; }
  friend bool operator==(const TapeVar& a, const TapeVar& b) { return a.v_ == b.v_; }
  friend bool operator!=(const TapeVar& a, const TapeVar& b) { return a.v_ != b.v_; }

  friend TapeVar unary(OpKind kind, const TapeVar& x, double fx, double dfx) {
    if (x.is_constant()) return TapeVar(fx);
    return TapeVar(fx, active_tape().record(kind, x.idx_, dfx, -1, 0.0));
  }
  friend TapeVar binary(OpKind kind, const TapeVar& x, const TapeVar& y,
                        double f, double dfx, double dfy) {
    if (x.is_constant() && y.is_constant()) return TapeVar(f);
    return TapeVar(f, active_tape().record(kind, x.idx_, dfx, y.idx_, dfy));
  }

 private:
  TapeVar(double v, std::int32_t idx) : v_(v), idx_(idx) {}

  double v_ = 0.0;
  std::int32_t idx_ = -1;
};

inline TapeVar sin(const TapeVar& x) {
  return unary(OpKind::kSin, x, std::sin(x.value()), std::cos(x.value()));
}
inline TapeVar cos(const TapeVar& x) {
  return unary(OpKind::kCos, x, std::cos(x.value()), -std::sin(x.value()));
}
inline TapeVar tanh(const TapeVar& x) {
  const double t = std::tanh(x.value());
  return unary(OpKind::kTanh, x, t, 1.0 - t * t);
}
inline TapeVar exp(const TapeVar& x) {
  const double e = std::exp(x.value());
  return unary(OpKind::kExp, x, e, e);
}
inline TapeVar log(const TapeVar& x) {
  return unary(OpKind::kLog, x, std::log(x.value()), 1.0 / x.value());
}
inline TapeVar sqrt(const TapeVar& x) {
  const double s = std::sqrt(x.value());
  return unary(OpKind::kSqrt, x, s, x.value() > 0.0 ? 0.5 / s : 0.0);
}
inline TapeVar abs(const TapeVar& x) {
  const double s = x.value() > 0.0 ? 1.0 : (x.value() < 0.0 ? -1.0 : 0.0);
  return unary(OpKind::kAbs, x, std::abs(x.value()), s);
}
inline TapeVar pow(const TapeVar& x, const TapeVar& y) {
  const double f = std::pow(x.value(), y.value());
  const double dfx = y.value() * std::pow(x.value(), y.value() - 1.0);
  const double dfy = x.value() > 0.0 ? f * std::log(x.value()) : 0.0;
  return binary(OpKind::kPow, x, y, f, dfx, dfy);
}
inline TapeVar pow(const TapeVar& x, double y) { return pow(x, TapeVar(y)); }
inline TapeVar atan2(const TapeVar& y, const TapeVar& x) {
  const double d = x.value() * x.value() + y.value() * y.value();
  return binary(OpKind::kAtan2, y, x, std::atan2(y.value(), x.value()),
                x.value() / d, -y.value() / d);
}

// Recorded as a single node whose only parent is the taken branch, so the
// branch choice is baked into the tape and replayed by the backward sweep.
inline TapeVar select(const TapeVar& c, const TapeVar& a, const TapeVar& b) {
  const TapeVar& taken = c.value() > 0.0 ? a : b;
  if (taken.is_constant()) return TapeVar(taken.value());
  return unary(OpKind::kSelect, taken, taken.value(), 1.0);
}

inline double primal(const TapeVar& x) { return x.value(); }

}  // namespace diffsim
