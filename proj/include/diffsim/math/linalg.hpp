#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "diffsim/error.hpp"
#include "diffsim/scalar/scalar_ops.hpp"

namespace diffsim {

template <class S>
struct Vec3 {
  S x{}, y{}, z{};

  static Vec3 zero() { return {S(0.0), S(0.0), S(0.0)}; }

  S& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  const S& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(const S& s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }

  friend Vec3 operator*(const S& s, const Vec3& v) { return v * s; }
  friend S dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
  }
  friend Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
            a.x * b.y - a.y * b.x};
  }
  friend S norm_squared(const Vec3& v) { return dot(v, v); }
  friend S norm(const Vec3& v) {
    using std::sqrt;
    return sqrt(dot(v, v));
  }
};

// Row-major 3x3.
template <class S>
struct Mat3 {
  std::array<S, 9> m{};

  static Mat3 identity() {
    Mat3 r;
    r.m = {S(1.0), S(0.0), S(0.0), S(0.0), S(1.0),
           S(0.0), S(0.0), S(0.0), S(1.0)};
    return r;
  }
  static Mat3 zero() { return Mat3{}; }
  static Mat3 diagonal(const S& a, const S& b, const S& c) {
    Mat3 r;
    r.m = {a, S(0.0), S(0.0), S(0.0), b, S(0.0), S(0.0), S(0.0), c};
    return r;
  }
  // skew(v) * w == cross(v, w)
  static Mat3 skew(const Vec3<S>& v) {
    Mat3 r;
    r.m = {S(0.0), -v.z, v.y, v.z, S(0.0), -v.x, -v.y, v.x, S(0.0)};
    return r;
  }

  S& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }
  const S& operator()(int r, int c) const {
    return m[static_cast<std::size_t>(3 * r + c)];
  }

  Mat3 transpose() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  Vec3<S> operator*(const Vec3<S>& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        S acc = (*this)(i, 0) * o(0, j);
        acc += (*this)(i, 1) * o(1, j);
        acc += (*this)(i, 2) * o(2, j);
        r(i, j) = acc;
      }
    return r;
  }
  Mat3 operator+(const Mat3& o) const {
    Mat3 r;
    for (std::size_t i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
    return r;
  }
  Mat3 operator-(const Mat3& o) const {
    Mat3 r;
    for (std::size_t i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
    return r;
  }
  Mat3 operator*(const S& s) const {
    Mat3 r;
    for (std::size_t i = 0; i < 9; ++i) r.m[i] = m[i] * s;
    return r;
  }
};

// Unit quaternion, scalar-first storage.
template <class S>
struct Quat {
  S w{1.0}, x{0.0}, y{0.0}, z{0.0};

  static Quat identity() { return {}; }

  static Quat from_axis_angle(const Vec3<S>& axis, const S& angle) {
    using std::cos;
    using std::sin;
    const S half = angle * S(0.5);
    const S s = sin(half);
    return {cos(half), axis.x * s, axis.y * s, axis.z * s};
  }

  Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }

  Quat normalized() const {
    using std::sqrt;
    const S n = sqrt(w * w + x * x + y * y + z * z);
    return {w / n, x / n, y / n, z / n};
  }

  // Rotation matrix sending body coordinates to world coordinates.
  Mat3<S> to_matrix() const {
    Mat3<S> r;
    const S xx = x * x, yy = y * y, zz = z * z;
    const S xy = x * y, xz = x * z, yz = y * z;
    const S wx = w * x, wy = w * y, wz = w * z;
    r.m = {S(1.0) - S(2.0) * (yy + zz), S(2.0) * (xy - wz), S(2.0) * (xz + wy),
           S(2.0) * (xy + wz), S(1.0) - S(2.0) * (xx + zz), S(2.0) * (yz - wx),
           S(2.0) * (xz - wy), S(2.0) * (yz + wx), S(1.0) - S(2.0) * (xx + yy)};
    return r;
  }

  // dq/dt for a body-frame angular velocity.
  Quat derivative(const Vec3<S>& omega_body) const {
    const Quat o{S(0.0), omega_body.x, omega_body.y, omega_body.z};
    Quat d = (*this) * o;
    return {d.w * S(0.5), d.x * S(0.5), d.y * S(0.5), d.z * S(0.5)};
  }
};

// Small dense matrix for joint-space quantities (mass matrices, joint-space
// inertia blocks). Row-major, sized at runtime, n stays single digits.
template <class S>
class DMat {
 public:
  DMat() = default;
  DMat(int rows, int cols) : rows_(rows), cols_(cols), d_(static_cast<std::size_t>(rows * cols), S(0.0)) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  S& operator()(int r, int c) { return d_[static_cast<std::size_t>(r * cols_ + c)]; }
  const S& operator()(int r, int c) const {
    return d_[static_cast<std::size_t>(r * cols_ + c)];
  }

  static DMat identity(int n) {
    DMat r(n, n);
    for (int i = 0; i < n; ++i) r(i, i) = S(1.0);
    return r;
  }

  // In-place LDL^T factorization of a symmetric matrix; returns false when a
  // pivot falls below `tol` in primal magnitude.
  bool ldlt_factor(double tol = 1e-12) {
    for (int j = 0; j < rows_; ++j) {
      S d = (*this)(j, j);
      for (int k = 0; k < j; ++k)
        d -= (*this)(j, k) * (*this)(j, k) * (*this)(k, k);
      if (std::abs(primal(d)) <= tol) return false;
      (*this)(j, j) = d;
      for (int i = j + 1; i < rows_; ++i) {
        S v = (*this)(i, j);
        for (int k = 0; k < j; ++k)
          v -= (*this)(i, k) * (*this)(j, k) * (*this)(k, k);
        (*this)(i, j) = v / d;
      }
    }
    return true;
  }

  // Solves A x = b given a prior ldlt_factor().
  std::vector<S> ldlt_solve(std::vector<S> b) const {
    const int n = rows_;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < i; ++k)
        b[static_cast<std::size_t>(i)] -= (*this)(i, k) * b[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] /= (*this)(i, i);
    for (int i = n - 1; i >= 0; --i)
      for (int k = i + 1; k < n; ++k)
        b[static_cast<std::size_t>(i)] -= (*this)(k, i) * b[static_cast<std::size_t>(k)];
    return b;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<S> d_;
};

}  // namespace diffsim
