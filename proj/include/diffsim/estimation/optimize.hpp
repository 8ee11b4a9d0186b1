#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "diffsim/estimation/objective.hpp"
#include "diffsim/scalar/gradient.hpp"

namespace diffsim {

// Evaluates objective value and gradient into grad_out (same length as x).
// Divergent rollouts surface as +inf with a zero gradient so global search
// can discard them instead of aborting.
using ValueAndGrad =
    std::function<double(std::span<const double>, std::span<double>)>;

template <class F>
ValueAndGrad make_value_and_grad(F f, GradMode mode = GradMode::kReverseTape,
                                 double fd_epsilon = 1e-6) {
  return [f = std::move(f), mode, fd_epsilon](std::span<const double> x,
                                              std::span<double> grad) {
    try {
      auto adapter = make_objective(f);
      const auto g = evaluate_gradient(
          static_cast<const DifferentiableFunction&>(adapter), x,
          {mode, fd_epsilon});
      std::copy(g.begin(), g.end(), grad.begin());
      std::vector<double> xs(x.begin(), x.end());
      return adapter.eval(std::span<const double>(xs));
    } catch (const RolloutError&) {
      std::fill(grad.begin(), grad.end(), 0.0);
      return std::numeric_limits<double>::infinity();
    } catch (const EvaluationError& e) {
      throw OptimizerError(std::string("non-finite gradient: ") + e.what(),
                           e.coordinate);
    }
  };
}

enum class LocalMethod { kAdam, kLbfgs };

struct LocalOptions {
  LocalMethod method = LocalMethod::kLbfgs;
  int steps = 50;
  // Adam
  double lr = 1e-2;
  double lr_min = -1.0;  // < 0: constant learning rate
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  // L-BFGS
  int memory = 10;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  int max_linesearch = 25;
};

struct LocalResult {
  ParameterBlock block;
  double objective = std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

namespace detail {

inline void project_bounds(std::vector<double>& x, const ParameterBlock& b) {
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::clamp(x[i], b.lower[i], b.upper[i]);
}

}  // namespace detail

// Gradient descent with monotone acceptance: the returned block carries the
// best parameters seen, so the final objective never exceeds the starting
// one. Bounds are enforced by projection after every update.
inline LocalResult local_minimize(const ValueAndGrad& f,
                                  const ParameterBlock& init,
                                  const LocalOptions& options = {}) {
  if (options.steps < 1)
    throw ArgumentError("local_minimize: steps must be >= 1");
  init.validate();
  LocalResult result;
  result.block = init;

  const std::size_t n = init.size();
  std::vector<double> x = init.values;
  detail::project_bounds(x, init);
  std::vector<double> g(n, 0.0);

  double fx = f(x, g);
  ++result.evaluations;
  std::vector<double> best_x = x;
  double best_f = fx;

  if (options.method == LocalMethod::kAdam) {
    std::vector<double> m(n, 0.0), v(n, 0.0);
    const double lr_end = options.lr_min < 0.0 ? options.lr : options.lr_min;
    for (int t = 1; t <= options.steps; ++t) {
      if (!std::isfinite(fx)) break;
      // cosine schedule from lr down to lr_end
      const double frac = options.steps > 1
                              ? static_cast<double>(t - 1) / (options.steps - 1)
                              : 0.0;
      const double lr =
          lr_end + 0.5 * (options.lr - lr_end) * (1.0 + std::cos(M_PI * frac));
      for (std::size_t i = 0; i < n; ++i) {
        m[i] = options.beta1 * m[i] + (1.0 - options.beta1) * g[i];
        v[i] = options.beta2 * v[i] + (1.0 - options.beta2) * g[i] * g[i];
        const double mh = m[i] / (1.0 - std::pow(options.beta1, t));
        const double vh = v[i] / (1.0 - std::pow(options.beta2, t));
        x[i] -= lr * mh / (std::sqrt(vh) + options.adam_eps);
      }
      detail::project_bounds(x, init);
      fx = f(x, g);
      ++result.evaluations;
      if (fx < best_f) {
        best_f = fx;
        best_x = x;
      }
    }
  } else {
    // L-BFGS two-loop recursion with Armijo backtracking; steps that cannot
    // decrease the objective are rejected and terminate the run
    std::deque<std::pair<std::vector<double>, std::vector<double>>> pairs;
    std::vector<double> g_new(n, 0.0);
    for (int t = 0; t < options.steps; ++t) {
      if (!std::isfinite(fx)) break;
      std::vector<double> d(n);
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      std::vector<double> alpha(pairs.size());
      for (std::size_t k = pairs.size(); k-- > 0;) {
        const auto& [s, y] = pairs[k];
        double sy = 0.0, sd = 0.0;
        for (std::size_t i = 0; i < n; ++i) sy += s[i] * y[i];
        if (sy <= 1e-12) continue;
        for (std::size_t i = 0; i < n; ++i) sd += s[i] * d[i];
        alpha[k] = sd / sy;
        for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[k] * y[i];
      }
      if (!pairs.empty()) {
        const auto& [s, y] = pairs.back();
        double sy = 0.0, yy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          sy += s[i] * y[i];
          yy += y[i] * y[i];
        }
        if (sy > 1e-12 && yy > 1e-12) {
          const double gamma = sy / yy;
          for (auto& di : d) di *= gamma;
        }
      }
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& [s, y] = pairs[k];
        double sy = 0.0, yd = 0.0;
        for (std::size_t i = 0; i < n; ++i) sy += s[i] * y[i];
        if (sy <= 1e-12) continue;
        for (std::size_t i = 0; i < n; ++i) yd += y[i] * d[i];
        const double beta = yd / sy;
        for (std::size_t i = 0; i < n; ++i) d[i] += (alpha[k] - beta) * s[i];
      }

      double gd = 0.0;
      for (std::size_t i = 0; i < n; ++i) gd += g[i] * d[i];
      if (gd > -1e-18) break;  // not a descent direction: converged

      double step = 1.0;
      bool accepted = false;
      double f_new = fx;
      std::vector<double> x_new(n);
      for (int ls = 0; ls < options.max_linesearch; ++ls) {
        for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * d[i];
        detail::project_bounds(x_new, init);
        double actual_gd = 0.0;  // Armijo slope along the projected move
        for (std::size_t i = 0; i < n; ++i)
          actual_gd += g[i] * (x_new[i] - x[i]);
        f_new = f(x_new, g_new);
        ++result.evaluations;
        if (std::isfinite(f_new) &&
            f_new <= fx + options.armijo_c1 * actual_gd && f_new < fx) {
          accepted = true;
          break;
        }
        step *= options.backtrack;
      }
      if (!accepted) break;  // line-search failure: reject uphill moves

      std::vector<double> s(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = x_new[i] - x[i];
        y[i] = g_new[i] - g[i];
      }
      pairs.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(pairs.size()) > options.memory) pairs.pop_front();
      x = std::move(x_new);
      g = g_new;
      fx = f_new;
      if (fx < best_f) {
        best_f = fx;
        best_x = x;
      }
    }
  }

  result.block.values = std::move(best_x);
  result.objective = best_f;
  return result;
}

}  // namespace diffsim
