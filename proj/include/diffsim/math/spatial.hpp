#pragma once

#include <array>

#include "diffsim/math/linalg.hpp"

// Featherstone-style 6-D spatial algebra, angular components above linear.
// A Transform carries coordinates from an outer frame A into an inner frame B
// whose origin sits at `r` (expressed in A) with orientation `E` rotating
// A-coordinates into B-coordinates.

namespace diffsim {

template <class S>
struct SpatialMotion {
  Vec3<S> angular{};
  Vec3<S> linear{};

  static SpatialMotion zero() { return {Vec3<S>::zero(), Vec3<S>::zero()}; }

  SpatialMotion operator+(const SpatialMotion& o) const {
    return {angular + o.angular, linear + o.linear};
  }
  SpatialMotion operator-(const SpatialMotion& o) const {
    return {angular - o.angular, linear - o.linear};
  }
  SpatialMotion operator*(const S& s) const {
    return {angular * s, linear * s};
  }
  SpatialMotion& operator+=(const SpatialMotion& o) {
    angular += o.angular;
    linear += o.linear;
    return *this;
  }

  S operator[](int i) const {
    return i < 3 ? angular[i] : linear[i - 3];
  }
};

template <class S>
struct SpatialForce {
  Vec3<S> torque{};
  Vec3<S> force{};

  static SpatialForce zero() { return {Vec3<S>::zero(), Vec3<S>::zero()}; }

  SpatialForce operator+(const SpatialForce& o) const {
    return {torque + o.torque, force + o.force};
  }
  SpatialForce operator-(const SpatialForce& o) const {
    return {torque - o.torque, force - o.force};
  }
  SpatialForce operator*(const S& s) const { return {torque * s, force * s}; }
  SpatialForce& operator+=(const SpatialForce& o) {
    torque += o.torque;
    force += o.force;
    return *this;
  }
  SpatialForce& operator-=(const SpatialForce& o) {
    torque -= o.torque;
    force -= o.force;
    return *this;
  }

  S operator[](int i) const { return i < 3 ? torque[i] : force[i - 3]; }
};

// Dual pairing <f, v> = torque.angular + force.linear (power when v is a
// velocity).
template <class S>
S pair(const SpatialForce<S>& f, const SpatialMotion<S>& v) {
  return dot(f.torque, v.angular) + dot(f.force, v.linear);
}

// Motion-motion cross product (velocity derivative of a motion vector).
template <class S>
SpatialMotion<S> cross_motion(const SpatialMotion<S>& v,
                              const SpatialMotion<S>& w) {
  return {cross(v.angular, w.angular),
          cross(v.angular, w.linear) + cross(v.linear, w.angular)};
}

// Motion-force cross product (velocity derivative of a force vector).
template <class S>
SpatialForce<S> cross_force(const SpatialMotion<S>& v,
                            const SpatialForce<S>& f) {
  return {cross(v.angular, f.torque) + cross(v.linear, f.force),
          cross(v.angular, f.force)};
}

template <class S>
struct SpatialTransform {
  Mat3<S> E = Mat3<S>::identity();  // rotation, A-coords -> B-coords
  Vec3<S> r = Vec3<S>::zero();      // origin of B expressed in A

  static SpatialTransform identity() { return {}; }
  static SpatialTransform rotation(const Mat3<S>& E) {
    return {E, Vec3<S>::zero()};
  }
  static SpatialTransform translation(const Vec3<S>& r) {
    return {Mat3<S>::identity(), r};
  }

  SpatialTransform inverse() const { return {E.transpose(), -(E * r)}; }

  // Composition: (X2 * X1) applies X1 first. Both map outer to inner.
  SpatialTransform operator*(const SpatialTransform& first) const {
    return {E * first.E, first.r + first.E.transpose() * r};
  }

  Vec3<S> apply_point(const Vec3<S>& p) const { return E * (p - r); }
  Vec3<S> apply_point_inverse(const Vec3<S>& p) const {
    return E.transpose() * p + r;
  }

  SpatialMotion<S> apply(const SpatialMotion<S>& m) const {
    return {E * m.angular, E * (m.linear - cross(r, m.angular))};
  }
  SpatialMotion<S> apply_inverse(const SpatialMotion<S>& m) const {
    const Vec3<S> w = E.transpose() * m.angular;
    return {w, E.transpose() * m.linear + cross(r, w)};
  }

  SpatialForce<S> apply(const SpatialForce<S>& f) const {
    return {E * (f.torque - cross(r, f.force)), E * f.force};
  }
  SpatialForce<S> apply_inverse(const SpatialForce<S>& f) const {
    const Vec3<S> fr = E.transpose() * f.force;
    return {E.transpose() * f.torque + cross(r, fr), fr};
  }
};

template <class S>
SpatialMotion<S> transform_motion(const SpatialTransform<S>& X,
                                  const SpatialMotion<S>& v) {
  return X.apply(v);
}

template <class S>
SpatialForce<S> transform_force(const SpatialTransform<S>& X,
                                const SpatialForce<S>& f) {
  return X.apply(f);
}

// Rigid-body inertia stored compactly: mass, center-of-mass offset from the
// frame origin, and the rotational inertia taken about the center of mass.
template <class S>
struct SpatialInertia {
  S mass{0.0};
  Vec3<S> com = Vec3<S>::zero();
  Mat3<S> inertia = Mat3<S>::zero();  // about the COM

  static SpatialInertia point_mass(const S& m, const Vec3<S>& at) {
    return {m, at, Mat3<S>::zero()};
  }

  // I v with the inertia expanded about the frame origin.
  SpatialForce<S> apply(const SpatialMotion<S>& v) const {
    const Vec3<S> lin_minus = v.linear - cross(com, v.angular);
    return {inertia * v.angular - cross(com, cross(com, v.angular)) * mass +
                cross(com, v.linear) * mass,
            lin_minus * mass};
  }

  SpatialInertia operator+(const SpatialInertia& o) const {
    // compact-form addition is only valid when both-coms coincide with the
    // combined com; general composition goes through the 6x6 form
    SpatialInertia r;
    r.mass = mass + o.mass;
    r.com = com;  // caller responsibility; used for same-com sums in tests
    r.inertia = inertia + o.inertia;
    return r;
  }

  // Kinetic energy 1/2 v^T I v.
  S energy(const SpatialMotion<S>& v) const {
    return pair(apply(v), v) * S(0.5);
  }
};

// Inertia expressed in the inner frame B given the same body described in A.
// The COM moves like a point; the COM-centered rotational inertia only
// rotates, which keeps the parallel-axis bookkeeping implicit.
template <class S>
SpatialInertia<S> transform_inertia(const SpatialTransform<S>& X,
                                    const SpatialInertia<S>& I) {
  return {I.mass, X.apply_point(I.com),
          X.E * I.inertia * X.E.transpose()};
}

// Dense 6x6, used for articulated-body inertias and test expansions.
template <class S>
struct Mat66 {
  std::array<S, 36> m{};

  S& operator()(int r, int c) { return m[static_cast<std::size_t>(6 * r + c)]; }
  const S& operator()(int r, int c) const {
    return m[static_cast<std::size_t>(6 * r + c)];
  }

  static Mat66 zero() { return {}; }

  static Mat66 from_inertia(const SpatialInertia<S>& I) {
    const Mat3<S> cx = Mat3<S>::skew(I.com);
    // origin inertia: I_com - m * cx * cx
    const Mat3<S> io = I.inertia - (cx * cx) * I.mass;
    const Mat3<S> h = cx * I.mass;
    Mat66 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        r(i, j) = io(i, j);
        r(i, j + 3) = h(i, j);
        r(i + 3, j) = h(j, i);
        r(i + 3, j + 3) = i == j ? I.mass : S(0.0);
      }
    return r;
  }

  // 6x6 motion-coordinate matrix of a spatial transform.
  static Mat66 motion_matrix(const SpatialTransform<S>& X) {
    const Mat3<S> bl = (X.E * Mat3<S>::skew(X.r)) * S(-1.0);
    Mat66 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        r(i, j) = X.E(i, j);
        r(i, j + 3) = S(0.0);
        r(i + 3, j) = bl(i, j);
        r(i + 3, j + 3) = X.E(i, j);
      }
    return r;
  }

  SpatialForce<S> apply(const SpatialMotion<S>& v) const {
    std::array<S, 6> in{v.angular.x, v.angular.y, v.angular.z,
                        v.linear.x, v.linear.y, v.linear.z};
    std::array<S, 6> out;
    for (int i = 0; i < 6; ++i) {
      S acc = (*this)(i, 0) * in[0];
      for (int j = 1; j < 6; ++j) acc += (*this)(i, j) * in[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(i)] = acc;
    }
    return {{out[0], out[1], out[2]}, {out[3], out[4], out[5]}};
  }

  Mat66 operator+(const Mat66& o) const {
    Mat66 r;
    for (std::size_t i = 0; i < 36; ++i) r.m[i] = m[i] + o.m[i];
    return r;
  }
  Mat66 operator-(const Mat66& o) const {
    Mat66 r;
    for (std::size_t i = 0; i < 36; ++i) r.m[i] = m[i] - o.m[i];
    return r;
  }
  Mat66 operator*(const Mat66& o) const {
    Mat66 r;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        S acc = (*this)(i, 0) * o(0, j);
        for (int k = 1; k < 6; ++k) acc += (*this)(i, k) * o(k, j);
        r(i, j) = acc;
      }
    return r;
  }
  Mat66 transpose() const {
    Mat66 r;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) r(i, j) = (*this)(j, i);
    return r;
  }
};

// Articulated inertia of a child expressed in its parent's coordinates:
// Ia_parent = M(X)^T Ia_child M(X) with X mapping parent -> child.
template <class S>
Mat66<S> inertia_to_parent(const SpatialTransform<S>& X, const Mat66<S>& Ia) {
  const Mat66<S> M = Mat66<S>::motion_matrix(X);
  return M.transpose() * (Ia * M);
}

}  // namespace diffsim
