#pragma once

#include <cmath>

#include "diffsim/scalar/dual.hpp"
#include "diffsim/scalar/tape.hpp"

// Generic scalar helpers shared by every realization of the numeric
// contract (double, Dual, TapeVar). Engine code pulls these in unqualified
// and relies on ADL for the user-defined types.

namespace diffsim {

inline double select(double c, double a, double b) { return c > 0.0 ? a : b; }
inline double primal(double x) { return x; }

template <class S>
S smax(const S& a, const S& b) {
  return select(a - b, a, b);
}
template <class S>
S smin(const S& a, const S& b) {
  return select(a - b, b, a);
}
template <class S>
S clamp(const S& x, const S& lo, const S& hi) {
  return smin(smax(x, lo), hi);
}

// ELU with the exponent clamped to non-positive arguments so the untaken
// branch can never overflow under branchless select.
template <class S>
S elu(const S& x) {
  using std::exp;
  return select(x, x, exp(smin(x, S(0.0))) - S(1.0));
}

template <class S>
S square(const S& x) {
  return x * x;
}

inline bool is_finite_primal(double x) { return std::isfinite(x); }
inline bool is_finite_primal(const Dual& x) { return std::isfinite(x.value()); }
inline bool is_finite_primal(const TapeVar& x) { return std::isfinite(x.value()); }

}  // namespace diffsim
