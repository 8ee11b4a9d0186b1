#pragma once

#include <vector>

#include "diffsim/multibody/model.hpp"

namespace diffsim {

// Position update half of the semi-implicit step: installs qd_new and
// advances positions with it. Floating-base orientation integrates through
// the quaternion derivative and is renormalized.
template <class S>
JointState<S> advance_positions(const MultiBody<S>& m,
                                const JointState<S>& state,
                                std::vector<S> qd_new, double dt) {
  if (dt <= 0.0) throw ArgumentError("integrate: dt must be positive");
  if (static_cast<int>(qd_new.size()) != m.dof())
    throw ArgumentError("integrate: qd length != dof count");

  JointState<S> next;
  next.q = state.q;
  next.qd = std::move(qd_new);
  next.time = state.time + dt;
  const S h(dt);

  for (const auto& joint : m.joints) {
    const auto qi = static_cast<std::size_t>(joint.q_index);
    const auto di = static_cast<std::size_t>(joint.qd_index);
    switch (joint.kind) {
      case JointKind::kFixed:
        break;
      case JointKind::kRevolute:
      case JointKind::kPrismatic:
        next.q[qi] = state.q[qi] + next.qd[di] * h;
        break;
      case JointKind::kFloating: {
        const Quat<S> quat{state.q[qi], state.q[qi + 1], state.q[qi + 2],
                           state.q[qi + 3]};
        const Vec3<S> omega{next.qd[di], next.qd[di + 1], next.qd[di + 2]};
        const Vec3<S> vel{next.qd[di + 3], next.qd[di + 4], next.qd[di + 5]};
        const Quat<S> dq = quat.derivative(omega);
        const Quat<S> qn = Quat<S>{quat.w + dq.w * h, quat.x + dq.x * h,
                                   quat.y + dq.y * h, quat.z + dq.z * h}
                               .normalized();
        next.q[qi] = qn.w;
        next.q[qi + 1] = qn.x;
        next.q[qi + 2] = qn.y;
        next.q[qi + 3] = qn.z;
        // linear velocity lives in the body frame; rotate into world
        const Vec3<S> v_world = quat.to_matrix() * vel;
        next.q[qi + 4] = state.q[qi + 4] + v_world.x * h;
        next.q[qi + 5] = state.q[qi + 5] + v_world.y * h;
        next.q[qi + 6] = state.q[qi + 6] + v_world.z * h;
        break;
      }
    }
  }
  return next;
}

// Semi-implicit Euler: velocities advance with the current acceleration,
// then positions advance with the updated velocities.
template <class S>
JointState<S> integrate_semi_implicit(const MultiBody<S>& m,
                                      const JointState<S>& state,
                                      const std::vector<S>& qdd, double dt) {
  if (static_cast<int>(qdd.size()) != m.dof())
    throw ArgumentError("integrate: qdd length != dof count");
  std::vector<S> qd_new = state.qd;
  const S h(dt);
  for (std::size_t i = 0; i < qd_new.size(); ++i) qd_new[i] += qdd[i] * h;
  return advance_positions(m, state, std::move(qd_new), dt);
}

}  // namespace diffsim
