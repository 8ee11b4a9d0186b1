#pragma once

#include <vector>

#include "diffsim/contact/detect.hpp"

namespace diffsim {

// Hunt-Crossley spring-damper with a tanh-saturated friction law. Smooth in
// every input, so gradients flow through without subgradient special cases.
template <class S>
struct PenaltyParams {
  S stiffness{1e4};            // N/m
  S damping{1.0};              // dimensionless Hunt-Crossley factor (s/m)
  S smoothing_velocity{0.1};   // m/s, friction saturation scale

  bool valid() const {
    return primal(stiffness) > 0.0 && primal(smoothing_velocity) > 0.0;
  }
};

template <class S>
struct PenaltyPointForce {
  Vec3<S> force;        // on body_b at the contact point, world coordinates
  S normal_force;       // magnitude along the contact normal
  S penetration_rate;   // d(penetration)/dt
  Vec3<S> t1, t2;       // deterministic tangent basis
  S ft1, ft2;           // friction components along t1/t2
};

// Tangent basis completing the normal, seeded from the smallest normal
// component so the choice is deterministic.
template <class S>
void tangent_basis(const Vec3<S>& n, Vec3<S>& t1, Vec3<S>& t2) {
  const double ax = std::abs(primal(n.x));
  const double ay = std::abs(primal(n.y));
  const double az = std::abs(primal(n.z));
  Vec3<S> e{S(0.0), S(0.0), S(0.0)};
  if (ax <= ay && ax <= az)
    e.x = S(1.0);
  else if (ay <= az)
    e.y = S(1.0);
  else
    e.z = S(1.0);
  t1 = cross(n, e);
  t1 = t1 * (S(1.0) / norm(t1));
  t2 = cross(n, t1);
}

// Per-point penalty force given the relative velocity of body b against
// body a at the contact point (world coordinates).
template <class S>
PenaltyPointForce<S> penalty_point_force(const ContactPoint<S>& c,
                                         const Vec3<S>& v_rel,
                                         const PenaltyParams<S>& p) {
  PenaltyPointForce<S> out;
  const S v_n = dot(c.normal, v_rel);
  out.penetration_rate = -v_n;
  // f_n = max(0, k d (1 + c ddot))
  out.normal_force =
      smax(p.stiffness * c.penetration *
               (S(1.0) + p.damping * out.penetration_rate),
           S(0.0));
  tangent_basis(c.normal, out.t1, out.t2);
  const Vec3<S> v_t = v_rel - c.normal * v_n;
  const S vt_norm = norm(v_t);
  using std::tanh;
  const S scale = c.mu * out.normal_force * tanh(vt_norm / p.smoothing_velocity) /
                  smax(vt_norm, S(1e-9));
  out.ft1 = -scale * dot(out.t1, v_t);
  out.ft2 = -scale * dot(out.t2, v_t);
  out.force = c.normal * out.normal_force + out.t1 * out.ft1 + out.t2 * out.ft2;
  return out;
}

// Relative velocity of body b against body a at a world point.
template <class S>
Vec3<S> contact_relative_velocity(
    const ContactPoint<S>& c,
    const std::vector<SpatialMotion<S>>& link_velocities_world) {
  auto point_velocity = [&](int link) {
    if (link < 0) return c.surface_velocity;
    const auto& v = link_velocities_world[static_cast<std::size_t>(link)];
    return v.linear + cross(v.angular, c.point);
  };
  return point_velocity(c.body_b) - point_velocity(c.body_a);
}

// Spec-level operation: one spatial force (world coordinates, about the
// world origin) per contact, acting on body_b. Callers negate for body_a.
template <class S>
std::vector<SpatialForce<S>> penalty_forces(
    const std::vector<ContactPoint<S>>& contacts, const MultiBody<S>& m,
    const JointState<S>& state, const PenaltyParams<S>& params) {
  if (!params.valid())
    throw ArgumentError("penalty: stiffness and smoothing velocity must be > 0");
  const auto vw = link_world_velocities(m, state);
  std::vector<SpatialForce<S>> out;
  out.reserve(contacts.size());
  for (const auto& c : contacts) {
    const auto f = penalty_point_force(c, contact_relative_velocity(c, vw), params);
    out.push_back({cross(c.point, f.force), f.force});
  }
  return out;
}

}  // namespace diffsim
