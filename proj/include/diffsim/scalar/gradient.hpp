#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "diffsim/error.hpp"
#include "diffsim/scalar/dual.hpp"
#include "diffsim/scalar/scalar_ops.hpp"
#include "diffsim/scalar/tape.hpp"

namespace diffsim {

enum class GradMode { kFiniteDifference, kForwardDual, kReverseTape };

struct GradientRequest {
  GradMode mode = GradMode::kReverseTape;
  // Base step for central differences; scaled per coordinate by max(1, |x_i|).
  double fd_epsilon = 1e-6;
};

// An objective evaluable under all three scalar realizations. Wrap a generic
// callable with make_objective() instead of implementing this directly.
class DifferentiableFunction {
 public:
  virtual ~DifferentiableFunction() = default;
  virtual double eval(std::span<const double> x) const = 0;
  virtual Dual eval(std::span<const Dual> x) const = 0;
  virtual TapeVar eval(std::span<const TapeVar> x) const = 0;
};

template <class F>
class FunctionAdapter final : public DifferentiableFunction {
 public:
  explicit FunctionAdapter(F f) : f_(std::move(f)) {}
  double eval(std::span<const double> x) const override { return f_(x); }
  Dual eval(std::span<const Dual> x) const override { return f_(x); }
  TapeVar eval(std::span<const TapeVar> x) const override { return f_(x); }

 private:
  F f_;
};

template <class F>
FunctionAdapter<F> make_objective(F f) {
  return FunctionAdapter<F>(std::move(f));
}

namespace detail {

inline void check_finite(double y, int coordinate) {
  if (!std::isfinite(y))
    throw EvaluationError("objective evaluated to a non-finite value",
                          coordinate);
}

inline std::vector<double> gradient_fd(const DifferentiableFunction& f,
                                       std::span<const double> x,
                                       double epsilon) {
  if (epsilon <= 0.0)
    throw ArgumentError("finite differences require fd_epsilon > 0");
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = epsilon * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    const double up = f.eval(std::span<const double>(xp));
    check_finite(up, static_cast<int>(i));
    xp[i] = x[i] - h;
    const double um = f.eval(std::span<const double>(xp));
    check_finite(um, static_cast<int>(i));
    xp[i] = x[i];
    g[i] = (up - um) / (2.0 * h);
  }
  return g;
}

inline std::vector<double> gradient_dual(const DifferentiableFunction& f,
                                         std::span<const double> x) {
  std::vector<Dual> xs;
  xs.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    xs.push_back(Dual::seeded(x[i], i, x.size()));
  const Dual y = f.eval(std::span<const Dual>(xs));
  check_finite(y.value(), -1);
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    g[i] = y.tangent(i);
    if (!std::isfinite(g[i]))
      throw EvaluationError("non-finite forward tangent", static_cast<int>(i));
  }
  return g;
}

inline std::vector<double> gradient_tape(const DifferentiableFunction& f,
                                         std::span<const double> x) {
  Tape tape;
  TapeScope scope(tape);
  std::vector<TapeVar> xs;
  xs.reserve(x.size());
  for (double v : x) xs.push_back(TapeVar::input(v));
  const TapeVar y = f.eval(std::span<const TapeVar>(xs));
  check_finite(y.value(), -1);
  std::vector<double> g(x.size());
  if (y.is_constant()) return g;  // output independent of inputs
  tape.backward(y.index());
  for (std::size_t i = 0; i < x.size(); ++i) {
    g[i] = tape.adjoint(xs[i].index());
    if (!std::isfinite(g[i]))
      throw EvaluationError("non-finite adjoint", static_cast<int>(i));
  }
  return g;
}

}  // namespace detail

// One partial derivative per parameter; empty input yields an empty vector.
inline std::vector<double> evaluate_gradient(const DifferentiableFunction& f,
                                             std::span<const double> x,
                                             const GradientRequest& request) {
  if (x.empty()) return {};
  switch (request.mode) {
    case GradMode::kFiniteDifference:
      return detail::gradient_fd(f, x, request.fd_epsilon);
    case GradMode::kForwardDual:
      return detail::gradient_dual(f, x);
    case GradMode::kReverseTape:
      return detail::gradient_tape(f, x);
  }
  throw ArgumentError("unknown gradient mode");
}

template <class F>
std::vector<double> evaluate_gradient(F&& f, std::span<const double> x,
                                      const GradientRequest& request) {
  auto adapter = make_objective(std::forward<F>(f));
  return evaluate_gradient(static_cast<const DifferentiableFunction&>(adapter),
                           x, request);
}

}  // namespace diffsim
