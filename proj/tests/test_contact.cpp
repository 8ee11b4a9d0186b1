#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "diffsim/contact/ncp.hpp"
#include "diffsim/contact/penalty.hpp"
#include "diffsim/multibody/builders.hpp"
#include "diffsim/multibody/integrate.hpp"
#include "diffsim/scalar/gradient.hpp"

using namespace diffsim;

namespace {

// floating sphere over a world ground plane
MultiBody<double> sphere_on_plane(double radius, double mu = 0.5) {
  MultiBody<double> m;
  Link<double> link;
  link.name = "ball";
  link.inertia.mass = 1.0;
  link.inertia.inertia = Mat3<double>::diagonal(0.01, 0.01, 0.01);
  auto g = Geometry<double>::sphere(radius, Vec3<double>::zero());
  g.material.mu = mu;
  link.geoms.push_back(std::move(g));
  Joint<double> joint;
  joint.kind = JointKind::kFloating;
  joint.parent = -1;
  joint.name = "free";
  m.add_link(std::move(link), std::move(joint));
  auto plane = Geometry<double>::plane({0.0, 0.0, 1.0}, 0.0);
  plane.material.mu = mu;
  m.world_geoms.push_back(std::move(plane));
  m.finalize();
  return m;
}

}  // namespace

TEST_CASE("sphere at height 0.4 with radius 0.5 penetrates 0.1 m") {
  auto m = sphere_on_plane(0.5);
  auto s = m.zero_state();
  s.q[6] = 0.4;
  auto contacts = detect_contacts(m, s);
  REQUIRE(contacts.size() == 1);
  CHECK(contacts[0].penetration == doctest::Approx(0.1));
  CHECK(contacts[0].normal.z == doctest::Approx(1.0));
  CHECK(contacts[0].body_b == 0);
  CHECK(contacts[0].body_a == -1);
}

TEST_CASE("sphere far above the plane yields no contacts") {
  auto m = sphere_on_plane(0.5);
  auto s = m.zero_state();
  s.q[6] = 2.0;
  CHECK(detect_contacts(m, s).empty());
}

TEST_CASE("point grid resting flat emits one contact per overlapping point") {
  BoxSpec spec;
  spec.grid_resolution = 0.02;  // 5x5 grid on an 8x8 cm face
  auto m = build_floating_box(spec);
  auto s = m.zero_state();
  s.q[6] = spec.half_z;  // bottom face exactly on the plane
  auto contacts = detect_contacts(m, s);
  CHECK(contacts.size() == 25);
  for (const auto& c : contacts) {
    CHECK(primal(c.penetration) == doctest::Approx(0.0));
    CHECK(c.normal.z == doctest::Approx(1.0));
  }
  // partially lifted: tilt so only one edge stays in the margin band
  s.q[6] = spec.half_z + 0.05;
  CHECK(detect_contacts(m, s).empty());
}

TEST_CASE("unsupported geometry pairs are rejected") {
  // two dynamic spheres
  MultiBody<double> m;
  for (int i = 0; i < 2; ++i) {
    Link<double> link;
    link.inertia.mass = 1.0;
    link.geoms.push_back(Geometry<double>::sphere(0.1, Vec3<double>::zero()));
    Joint<double> joint;
    joint.kind = JointKind::kFloating;
    joint.parent = -1;
    m.add_link(std::move(link), std::move(joint));
  }
  auto s = m.zero_state();
  CHECK_THROWS_AS((void)detect_contacts(m, s), UnsupportedPairError);
}

TEST_CASE("Hunt-Crossley normal force formula") {
  ContactPoint<double> c;
  c.normal = {0.0, 0.0, 1.0};
  c.penetration = 0.01;
  c.mu = 0.5;
  PenaltyParams<double> p;
  p.stiffness = 1000.0;
  p.damping = 7.3;  // arbitrary: no effect at zero penetration rate
  p.smoothing_velocity = 0.1;

  SUBCASE("k=1000, d=0.01, ddot=0 gives 10 N") {
    auto f = penalty_point_force(c, Vec3<double>::zero(), p);
    CHECK(f.normal_force == doctest::Approx(10.0));
    CHECK(f.force.z == doctest::Approx(10.0));
  }
  SUBCASE("no friction without sliding") {
    auto f = penalty_point_force(c, {0.0, 0.0, -0.05}, p);
    CHECK(f.ft1 == doctest::Approx(0.0));
    CHECK(f.ft2 == doctest::Approx(0.0));
    // approach raises the force through the damping term
    CHECK(f.normal_force > 10.0);
  }
  SUBCASE("friction saturates at mu*fn for fast sliding") {
    auto f = penalty_point_force(c, {3.0 * 0.1, 0.0, 0.0}, p);
    const double ft = std::hypot(f.ft1, f.ft2);
    CHECK(ft == doctest::Approx(0.5 * f.normal_force).epsilon(0.01));
    // and opposes the slip direction
    const Vec3<double> fr = f.t1 * f.ft1 + f.t2 * f.ft2;
    CHECK(fr.x < 0.0);
    CHECK(std::abs(fr.y) < 1e-12);
  }
  SUBCASE("separation clamps the normal force at zero") {
    auto f = penalty_point_force(c, {0.0, 0.0, 100.0}, p);
    CHECK(f.normal_force == doctest::Approx(0.0));
  }
  SUBCASE("invalid params are rejected") {
    PenaltyParams<double> bad;
    bad.stiffness = 0.0;
    std::vector<ContactPoint<double>> cs{c};
    auto m = sphere_on_plane(0.5);
    CHECK_THROWS_AS((void)penalty_forces(cs, m, m.zero_state(), bad),
                    ArgumentError);
  }
}

TEST_CASE("penalty rollout is differentiable in the contact stiffness") {
  // drop a sphere, integrate under penalty contact, differentiate the final
  // height w.r.t. stiffness
  auto final_height = [](auto x) {
    using S = std::remove_cvref_t<decltype(x[0])>;
    auto md = sphere_on_plane(0.5);
    auto m = convert_model<S>(md);
    PenaltyParams<S> p;
    p.stiffness = x[0];
    p.damping = S(0.5);
    p.smoothing_velocity = S(0.1);
    JointState<S> s = m.zero_state();
    s.q[6] = S(0.55);
    std::vector<S> tau(6, S(0.0));
    for (int i = 0; i < 80; ++i) {
      auto contacts = detect_contacts(m, s);
      std::vector<SpatialForce<S>> fext(1, SpatialForce<S>::zero());
      if (!contacts.empty()) {
        auto forces = penalty_forces(contacts, m, s, p);
        for (const auto& f : forces) fext[0] += f;
      }
      auto qdd = forward_dynamics_aba(m, s, tau, fext);
      s = integrate_semi_implicit(m, s, qdd, 2e-3);
    }
    return s.q[6];
  };
  const std::vector<double> k{2000.0};
  auto g_fd = evaluate_gradient(final_height, k, {GradMode::kFiniteDifference, 1e-5});
  auto g_tape = evaluate_gradient(final_height, k, {GradMode::kReverseTape});
  auto g_dual = evaluate_gradient(final_height, k, {GradMode::kForwardDual});
  REQUIRE(std::abs(g_fd[0]) > 1e-10);
  CHECK(g_tape[0] == doctest::Approx(g_fd[0]).epsilon(1e-3));
  CHECK(g_dual[0] == doctest::Approx(g_fd[0]).epsilon(1e-3));
}

TEST_CASE("resting box: total normal impulse balances the weight") {
  BoxSpec spec;
  spec.mass = 1.0;
  spec.grid_resolution = 0.04;  // 3x3 grid
  auto m = build_floating_box(spec);
  auto s = m.zero_state();
  s.q[6] = spec.half_z;  // exact touch: zero penetration, zero bias
  std::vector<double> tau(6, 0.0);
  const double dt = 0.01;
  auto qdd = forward_dynamics_aba(m, s, tau);
  std::vector<double> qd_free(6);
  for (int i = 0; i < 6; ++i) qd_free[static_cast<std::size_t>(i)] =
      s.qd[static_cast<std::size_t>(i)] + qdd[static_cast<std::size_t>(i)] * dt;

  auto contacts = detect_contacts(m, s);
  REQUIRE(contacts.size() == 9);
  auto res = solve_ncp_pgs(contacts, m, s, qd_free, dt, 400);
  double total = 0.0;
  for (const auto& imp : res.impulses) {
    total += imp.normal;
    CHECK(imp.normal >= 0.0);
  }
  CHECK(total == doctest::Approx(1.0 * 9.81 * dt).epsilon(1e-6));
  CHECK(res.max_complementarity <= 1e-6);
  CHECK(res.min_separating_velocity >= -1e-9);
  // post-impulse velocity is (numerically) at rest
  for (int i = 0; i < 6; ++i)
    CHECK(std::abs(res.qd_post[static_cast<std::size_t>(i)]) < 1e-8);
}

TEST_CASE("no contacts produce an empty impulse list") {
  auto m = sphere_on_plane(0.5);
  auto s = m.zero_state();
  s.q[6] = 2.0;
  auto contacts = detect_contacts(m, s);
  auto res = solve_ncp_pgs(contacts, m, s, s.qd, 0.01);
  CHECK(res.impulses.empty());
}

TEST_CASE("sliding box rides the Coulomb cone boundary, opposing slip") {
  BoxSpec spec;
  spec.mass = 1.0;
  spec.mu = 0.5;
  spec.grid_resolution = 0.04;
  auto m = build_floating_box(spec);
  auto s = m.zero_state();
  s.q[6] = spec.half_z;
  std::vector<double> tau(6, 0.0);
  const double dt = 0.01;
  auto qdd = forward_dynamics_aba(m, s, tau);
  std::vector<double> qd_free = s.qd;
  for (int i = 0; i < 6; ++i) qd_free[static_cast<std::size_t>(i)] +=
      qdd[static_cast<std::size_t>(i)] * dt;
  qd_free[3] = 1.0;  // slide along +x at 1 m/s

  auto contacts = detect_contacts(m, s);
  auto res = solve_ncp_pgs(contacts, m, s, qd_free, dt, 200);
  double total_n = 0.0, total_t = 0.0;
  Vec3<double> friction_force = Vec3<double>::zero();
  for (std::size_t c = 0; c < contacts.size(); ++c) {
    const auto& imp = res.impulses[c];
    const double tmag = std::hypot(imp.tangent1, imp.tangent2);
    // cone membership with the spec tolerance
    CHECK(tmag <= 0.5 * imp.normal + 1e-9);
    // every point saturates: pure sliding
    CHECK(tmag == doctest::Approx(0.5 * imp.normal).epsilon(1e-6));
    total_n += imp.normal;
    total_t += tmag;
    Vec3<double> t1, t2;
    tangent_basis(contacts[c].normal, t1, t2);
    friction_force += t1 * imp.tangent1 + t2 * imp.tangent2;
  }
  CHECK(total_t == doctest::Approx(0.5 * total_n).epsilon(1e-6));
  CHECK(friction_force.x < 0.0);  // opposes +x slip
  CHECK(std::abs(friction_force.y) < 1e-9);
}

TEST_CASE("raising CFM monotonically softens the normal impulse") {
  auto m = sphere_on_plane(0.5);
  auto s = m.zero_state();
  s.q[6] = 0.5;  // exact touch
  std::vector<double> tau(6, 0.0);
  const double dt = 0.01;
  auto qdd = forward_dynamics_aba(m, s, tau);
  std::vector<double> qd_free = s.qd;
  for (int i = 0; i < 6; ++i) qd_free[static_cast<std::size_t>(i)] +=
      qdd[static_cast<std::size_t>(i)] * dt;

  double prev = std::numeric_limits<double>::infinity();
  for (double cfm : {0.0, 0.05, 0.2, 1.0}) {
    for (auto& g : m.world_geoms) g.material.cfm = cfm;
    for (auto& g : m.links[0].geoms) g.material.cfm = cfm;
    auto contacts = detect_contacts(m, s);
    REQUIRE(contacts.size() == 1);
    auto res = solve_ncp_pgs(contacts, m, s, qd_free, dt, 100);
    CHECK(res.impulses[0].normal < prev);
    prev = res.impulses[0].normal;
  }
}

TEST_CASE("pgs rejects bad arguments") {
  auto m = sphere_on_plane(0.5);
  auto s = m.zero_state();
  s.q[6] = 0.45;
  auto contacts = detect_contacts(m, s);
  CHECK_THROWS_AS((void)solve_ncp_pgs(contacts, m, s, s.qd, 0.0), ArgumentError);
  CHECK_THROWS_AS((void)solve_ncp_pgs(contacts, m, s, s.qd, 0.01, 0),
                  ArgumentError);
}
