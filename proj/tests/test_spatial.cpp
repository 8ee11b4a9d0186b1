#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "diffsim/math/spatial.hpp"

using namespace diffsim;

using V3 = Vec3<double>;
using M3 = Mat3<double>;
using X6 = SpatialTransform<double>;
using SM = SpatialMotion<double>;
using SF = SpatialForce<double>;
using SI = SpatialInertia<double>;

namespace {

std::mt19937_64 rng(424242);

double urand(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

V3 rand_vec(double scale = 1.0) {
  return {urand(-scale, scale), urand(-scale, scale), urand(-scale, scale)};
}

M3 rand_rotation() {
  V3 axis = rand_vec();
  const double n = norm(axis);
  axis = axis * (1.0 / (n > 1e-9 ? n : 1.0));
  return Quat<double>::from_axis_angle(axis, urand(-3.0, 3.0)).to_matrix().transpose();
}

X6 rand_transform() { return {rand_rotation(), rand_vec(2.0)}; }

SI rand_inertia() {
  SI I;
  I.mass = urand(0.1, 5.0);
  I.com = rand_vec(0.5);
  // SPD rotational inertia satisfying the triangle inequality
  const double a = urand(0.1, 1.0), b = urand(0.1, 1.0), c = urand(0.1, 1.0);
  M3 D = M3::diagonal(a + b, b + c, a + c);
  M3 R = rand_rotation();
  I.inertia = R * D * R.transpose();
  return I;
}

// 4x4 homogeneous-coordinate oracle: a twist (w, v) in A maps to B via
// V_B = T V_A T^{-1} with T the 4x4 carrying A-coordinates into B.
SM homogeneous_twist_oracle(const X6& X, const SM& m) {
  std::array<std::array<double, 4>, 4> T{}, Tinv{}, V{}, tmp{}, out{};
  const M3 E = X.E;
  const V3 t = E * X.r;  // p_B = E p_A - E r
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      T[i][j] = E(i, j);
      Tinv[i][j] = E(j, i);
    }
    T[i][3] = -t[i];
    Tinv[i][3] = X.r[i];
  }
  T[3][3] = Tinv[3][3] = 1.0;
  M3 wh = M3::skew(m.angular);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) V[i][j] = wh(i, j);
    V[i][3] = m.linear[i];
  }
  auto mul = [](const auto& A, const auto& B, auto& C) {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double s = 0;
        for (int k = 0; k < 4; ++k) s += A[i][k] * B[k][j];
        C[i][j] = s;
      }
  };
  mul(T, V, tmp);
  mul(tmp, Tinv, out);
  return {{out[2][1], out[0][2], out[1][0]}, {out[0][3], out[1][3], out[2][3]}};
}

}  // namespace

TEST_CASE("identity transform leaves motion unchanged") {
  const SM v{{0.3, -0.2, 0.9}, {1.0, 2.0, 3.0}};
  const SM r = transform_motion(X6::identity(), v);
  CHECK(norm(r.angular - v.angular) < 1e-15);
  CHECK(norm(r.linear - v.linear) < 1e-15);
}

TEST_CASE("motion transform matches the homogeneous-coordinate oracle") {
  // the spec's pure-translation case first
  {
    const X6 X = X6::translation({0.0, 0.0, 1.0});
    const SM v{{0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}};
    const SM got = transform_motion(X, v);
    const SM want = homogeneous_twist_oracle(X, v);
    CHECK(norm(got.angular - want.angular) < 1e-12);
    CHECK(norm(got.linear - want.linear) < 1e-12);
  }
  for (int i = 0; i < 50; ++i) {
    const X6 X = rand_transform();
    const SM v{rand_vec(), rand_vec()};
    const SM got = transform_motion(X, v);
    const SM want = homogeneous_twist_oracle(X, v);
    CHECK(norm(got.angular - want.angular) < 1e-10);
    CHECK(norm(got.linear - want.linear) < 1e-10);
  }
}

TEST_CASE("X followed by X^-1 is the identity on motions") {
  for (int i = 0; i < 20; ++i) {
    const X6 X = rand_transform();
    const SM v{rand_vec(), rand_vec()};
    const SM back = transform_motion(X.inverse(), transform_motion(X, v));
    CHECK(norm(back.angular - v.angular) < 1e-12);
    CHECK(norm(back.linear - v.linear) < 1e-12);
    const SM fwd = X.apply(X.apply_inverse(v));
    CHECK(norm(fwd.angular - v.angular) < 1e-12);
    CHECK(norm(fwd.linear - v.linear) < 1e-12);
  }
}

TEST_CASE("force transform preserves the dual pairing") {
  for (int i = 0; i < 50; ++i) {
    const X6 X = rand_transform();
    const SM v{rand_vec(), rand_vec()};
    const SF f{rand_vec(), rand_vec()};
    const double p1 = pair(f, v);
    const double p2 = pair(transform_force(X, f), transform_motion(X, v));
    CHECK(p1 == doctest::Approx(p2).epsilon(1e-11));
  }
}

TEST_CASE("transform composition is associative") {
  for (int i = 0; i < 30; ++i) {
    const X6 A = rand_transform(), B = rand_transform(), C = rand_transform();
    const SM v{rand_vec(), rand_vec()};
    const SM lhs = transform_motion((A * B) * C, v);
    const SM rhs = transform_motion(A * (B * C), v);
    CHECK(norm(lhs.angular - rhs.angular) < 1e-12);
    CHECK(norm(lhs.linear - rhs.linear) < 1e-12);
  }
}

TEST_CASE("composed rotations stay orthonormal with unit determinant") {
  X6 X = X6::identity();
  for (int i = 0; i < 40; ++i) X = rand_transform() * X;
  const M3 RtR = X.E.transpose() * X.E;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      CHECK(RtR(r, c) == doctest::Approx(r == c ? 1.0 : 0.0).epsilon(1e-9));
  const double det =
      X.E(0, 0) * (X.E(1, 1) * X.E(2, 2) - X.E(1, 2) * X.E(2, 1)) -
      X.E(0, 1) * (X.E(1, 0) * X.E(2, 2) - X.E(1, 2) * X.E(2, 0)) +
      X.E(0, 2) * (X.E(1, 0) * X.E(2, 1) - X.E(1, 1) * X.E(2, 0));
  CHECK(det == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("identity transform leaves inertia unchanged") {
  const SI I = rand_inertia();
  const SI J = transform_inertia(X6::identity(), I);
  CHECK(J.mass == doctest::Approx(I.mass));
  CHECK(norm(J.com - I.com) < 1e-14);
  for (int i = 0; i < 9; ++i)
    CHECK(J.inertia.m[static_cast<std::size_t>(i)] ==
          doctest::Approx(I.inertia.m[static_cast<std::size_t>(i)]).epsilon(1e-12));
}

TEST_CASE("translated point mass gains the parallel-axis term") {
  // 1 kg at the origin of A; express in B displaced by 1 m along x
  const SI I = SI::point_mass(1.0, V3::zero());
  const X6 X = X6::translation({1.0, 0.0, 0.0});
  const SI J = transform_inertia(X, I);
  const auto M = Mat66<double>::from_inertia(J);
  // origin inertia gains 1 kg*m^2 about the two perpendicular axes
  CHECK(M(0, 0) == doctest::Approx(0.0));
  CHECK(M(1, 1) == doctest::Approx(1.0));
  CHECK(M(2, 2) == doctest::Approx(1.0));
}

TEST_CASE("kinetic energy is invariant under frame changes") {
  for (int i = 0; i < 50; ++i) {
    const X6 X = rand_transform();
    const SI I = rand_inertia();
    const SM v{rand_vec(), rand_vec()};
    const double ea = I.energy(v);
    const double eb = transform_inertia(X, I).energy(transform_motion(X, v));
    CHECK(ea == doctest::Approx(eb).epsilon(1e-9));
  }
}

TEST_CASE("spatial cross products") {
  SUBCASE("self-annihilation") {
    for (int i = 0; i < 10; ++i) {
      const SM v{rand_vec(), rand_vec()};
      const SM z = cross_motion(v, v);
      CHECK(norm(z.angular) < 1e-14);
      CHECK(norm(z.linear) < 1e-14);
    }
  }
  SUBCASE("duality <v x w, f> = -<w, v x* f>") {
    for (int i = 0; i < 50; ++i) {
      const SM v{rand_vec(), rand_vec()};
      const SM w{rand_vec(), rand_vec()};
      const SF f{rand_vec(), rand_vec()};
      const double lhs = pair(f, cross_motion(v, w));
      const double rhs = -pair(cross_force(v, f), w);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
  SUBCASE("pure angular z cross x gives y") {
    const SM v{{0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}};
    const SM w{{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    const SM r = cross_motion(v, w);
    CHECK(r.angular.x == doctest::Approx(0.0));
    CHECK(r.angular.y == doctest::Approx(1.0));
    CHECK(r.angular.z == doctest::Approx(0.0));
    CHECK(norm(r.linear) < 1e-15);
  }
}

TEST_CASE("inertia application is linear and finite") {
  const SI I = rand_inertia();
  const SM a{rand_vec(), rand_vec()};
  const SM b{rand_vec(), rand_vec()};
  const double s = 1.7;
  const SF lhs = I.apply(a * s + b);
  const SF rhs = I.apply(a) * s + I.apply(b);
  CHECK(norm(lhs.torque - rhs.torque) < 1e-12);
  CHECK(norm(lhs.force - rhs.force) < 1e-12);
  for (int i = 0; i < 6; ++i) CHECK(std::isfinite(lhs[i]));
}

TEST_CASE("compact inertia agrees with its 6x6 expansion") {
  for (int i = 0; i < 20; ++i) {
    const SI I = rand_inertia();
    const auto M = Mat66<double>::from_inertia(I);
    const SM v{rand_vec(), rand_vec()};
    const SF a = I.apply(v);
    const SF b = M.apply(v);
    CHECK(norm(a.torque - b.torque) < 1e-12);
    CHECK(norm(a.force - b.force) < 1e-12);
  }
}

TEST_CASE("articulated inertia transforms by congruence") {
  for (int i = 0; i < 20; ++i) {
    const X6 X = rand_transform();
    const SI I = rand_inertia();
    const auto Ia_child = Mat66<double>::from_inertia(I);
    const auto Ia_parent = inertia_to_parent(X, Ia_child);
    // must equal the compact transform through the inverse map
    const SI J = transform_inertia(X.inverse(), I);
    const auto want = Mat66<double>::from_inertia(J);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c)
        CHECK(Ia_parent(r, c) == doctest::Approx(want(r, c)).epsilon(1e-9));
  }
}

TEST_CASE("quaternion to matrix round trips through axis-angle") {
  const V3 axis{0.0, 1.0, 0.0};
  const auto q = Quat<double>::from_axis_angle(axis, 0.5);
  const M3 R = q.to_matrix();
  // rotating (0,0,-1) about +y by 0.5 rad swings it toward -x
  const V3 p = R * V3{0.0, 0.0, -1.0};
  CHECK(p.x == doctest::Approx(-std::sin(0.5)));
  CHECK(p.z == doctest::Approx(-std::cos(0.5)));
}
