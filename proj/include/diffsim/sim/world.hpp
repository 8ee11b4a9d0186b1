#pragma once

#include <functional>
#include <string>
#include <vector>

#include "diffsim/contact/ncp.hpp"
#include "diffsim/contact/penalty.hpp"
#include "diffsim/multibody/integrate.hpp"
#include "diffsim/neural/blueprint.hpp"

namespace diffsim {

enum class ContactModelKind { kNone, kNcp, kPenalty, kMixed };

// Everything one rollout needs besides the state: the model, the active
// neural augmentations, penalty-contact constants and scripted bodies.
template <class S>
struct SimSetup {
  MultiBody<S> model;
  AugmentationSet<S> augmentations;
  PenaltyParams<S> penalty;
  std::vector<KinematicSphere<S>> kinematics;
};

template <class T, class S>
SimSetup<T> convert_setup(const SimSetup<S>& s) {
  SimSetup<T> out;
  out.model = convert_model<T>(s.model);
  for (const auto& b : s.augmentations.all())
    out.augmentations.add(convert_blueprint<T>(b));
  out.penalty.stiffness = T(primal(s.penalty.stiffness));
  out.penalty.damping = T(primal(s.penalty.damping));
  out.penalty.smoothing_velocity = T(primal(s.penalty.smoothing_velocity));
  for (const auto& k : s.kinematics) {
    KinematicSphere<T> kt;
    kt.center = detail::convert<T>(k.center);
    kt.radius = T(primal(k.radius));
    kt.velocity = detail::convert<T>(k.velocity);
    kt.material.mu = T(primal(k.material.mu));
    kt.material.baumgarte_alpha = T(primal(k.material.baumgarte_alpha));
    kt.material.baumgarte_beta = T(primal(k.material.baumgarte_beta));
    kt.material.cfm = T(primal(k.material.cfm));
    kt.route = k.route;
    out.kinematics.push_back(std::move(kt));
  }
  return out;
}

struct StepOptions {
  double dt = 1e-3;
  ContactModelKind contact = ContactModelKind::kNone;
  int pgs_iterations = 50;
  DetectOptions detect;
};

namespace detail {

// Step-scoped simulation variables every blueprint may read: generalized
// coordinates plus, for a floating root, planar pose and twist shorthands.
template <class S>
void register_state_variables(const MultiBody<S>& m, const JointState<S>& s,
                              VariableRegistry<S>& reg) {
  for (std::size_t i = 0; i < s.q.size(); ++i)
    reg.set("q[" + std::to_string(i) + "]", s.q[i]);
  for (std::size_t i = 0; i < s.qd.size(); ++i)
    reg.set("qd[" + std::to_string(i) + "]", s.qd[i]);
  if (!m.joints.empty() && m.joints[0].kind == JointKind::kFloating) {
    using std::atan2;
    const Quat<S> quat{s.q[0], s.q[1], s.q[2], s.q[3]};
    const Mat3<S> R = quat.to_matrix();
    reg.set("base_x", s.q[4]);
    reg.set("base_y", s.q[5]);
    reg.set("base_z", s.q[6]);
    reg.set("base_yaw", atan2(R(1, 0), R(0, 0)));
    const Vec3<S> w_world = R * Vec3<S>{s.qd[0], s.qd[1], s.qd[2]};
    const Vec3<S> v_world = R * Vec3<S>{s.qd[3], s.qd[4], s.qd[5]};
    reg.set("base_wx", w_world.x);
    reg.set("base_wy", w_world.y);
    reg.set("base_wz", w_world.z);
    reg.set("base_vx", v_world.x);
    reg.set("base_vy", v_world.y);
    reg.set("base_vz", v_world.z);
  }
}

}  // namespace detail

// One simulation step: augmented torques, contact handling on the configured
// route(s), semi-implicit integration. Kinematic bodies advance with their
// scripted velocities.
template <class S>
JointState<S> step_world(const SimSetup<S>& setup,
                         std::vector<KinematicSphere<S>>& kinematics,
                         const JointState<S>& state,
                         const std::vector<S>& tau_applied,
                         const StepOptions& opt) {
  const auto& m = setup.model;
  VariableRegistry<S> registry;
  detail::register_state_variables(m, state, registry);

  // joint-torque augmentation: one vector-valued target or per-dof scalars
  std::vector<S> tau = tau_applied;
  if (const auto* bp = setup.augmentations.find("tau")) {
    tau = resolve_neural_vector(registry, *bp, std::move(tau));
  } else {
    for (int d = 0; d < m.dof(); ++d) {
      if (const auto* bpd =
              setup.augmentations.find("tau[" + std::to_string(d) + "]"))
        tau[static_cast<std::size_t>(d)] = resolve_neural_scalar(
            registry, *bpd, tau[static_cast<std::size_t>(d)]);
    }
  }

  std::vector<ContactPoint<S>> penalty_contacts, ncp_contacts;
  if (opt.contact != ContactModelKind::kNone) {
    auto contacts = detect_contacts(m, state, kinematics, opt.detect);
    for (auto& c : contacts) {
      const bool penalty_route =
          opt.contact == ContactModelKind::kPenalty ||
          (opt.contact == ContactModelKind::kMixed &&
           c.route == ContactRoute::kPenalty);
      (penalty_route ? penalty_contacts : ncp_contacts).push_back(std::move(c));
    }
  }

  // force-level contacts enter the dynamics as external forces
  std::vector<SpatialForce<S>> f_ext;
  if (!penalty_contacts.empty()) {
    f_ext.assign(m.links.size(), SpatialForce<S>::zero());
    const auto vw = link_world_velocities(m, state);
    const auto* friction_bp = setup.augmentations.find("contact_friction");
    for (const auto& c : penalty_contacts) {
      const auto pf =
          penalty_point_force(c, contact_relative_velocity(c, vw), setup.penalty);
      S ft1 = pf.ft1, ft2 = pf.ft2;
      if (friction_bp) {
        registry.set("contact_x", c.point.x);
        registry.set("contact_y", c.point.y);
        registry.set("contact_penetration", c.penetration);
        registry.set("contact_fn", pf.normal_force);
        std::vector<S> lateral{ft1, ft2};
        lateral = resolve_neural_vector(registry, *friction_bp, std::move(lateral));
        ft1 = lateral[0];
        ft2 = lateral[1];
      }
      const Vec3<S> force =
          c.normal * pf.normal_force + pf.t1 * ft1 + pf.t2 * ft2;
      const SpatialForce<S> sf{cross(c.point, force), force};
      f_ext[static_cast<std::size_t>(c.body_b)] += sf;
      if (c.body_a >= 0) f_ext[static_cast<std::size_t>(c.body_a)] -= sf;
    }
  }

  const auto qdd = forward_dynamics_aba(m, state, tau, f_ext);
  std::vector<S> qd_free = state.qd;
  const S h(opt.dt);
  for (std::size_t i = 0; i < qd_free.size(); ++i) qd_free[i] += qdd[i] * h;

  std::vector<S> qd_post = std::move(qd_free);
  if (!ncp_contacts.empty()) {
    auto res = solve_ncp_pgs(ncp_contacts, m, state, qd_post, opt.dt,
                             opt.pgs_iterations);
    qd_post = std::move(res.qd_post);
  }

  for (auto& k : kinematics) k.center += k.velocity * h;
  return advance_positions(m, state, std::move(qd_post), opt.dt);
}

// Convenience overload when no kinematic bodies participate.
template <class S>
JointState<S> step_world(const SimSetup<S>& setup, const JointState<S>& state,
                         const std::vector<S>& tau_applied,
                         const StepOptions& opt) {
  std::vector<KinematicSphere<S>> kin = setup.kinematics;
  return step_world(setup, kin, state, tau_applied, opt);
}

// Rolls `steps` steps from state0, pulling per-step controls from
// `control(step)` and invoking `on_state(step, state)` after each step.
// Non-finite states abort with the offending step index.
template <class S, class ControlFn, class StateFn>
JointState<S> rollout(const SimSetup<S>& setup, const JointState<S>& state0,
                      int steps, const StepOptions& opt, ControlFn&& control,
                      StateFn&& on_state) {
  std::vector<KinematicSphere<S>> kin = setup.kinematics;
  JointState<S> state = state0;
  for (int t = 0; t < steps; ++t) {
    state = step_world(setup, kin, state, control(t), opt);
    for (const auto& v : state.q)
      if (!is_finite_primal(v))
        throw RolloutError("rollout diverged at step " + std::to_string(t), t);
    for (const auto& v : state.qd)
      if (!is_finite_primal(v))
        throw RolloutError("rollout diverged at step " + std::to_string(t), t);
    on_state(t, state);
  }
  return state;
}

}  // namespace diffsim
