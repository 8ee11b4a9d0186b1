#pragma once

#include <vector>

#include "diffsim/multibody/model.hpp"

namespace diffsim {

// Passive joint force: linear spring toward q = 0 plus viscous damping.
template <class S>
S passive_joint_force(const Joint<S>& j, const S& q, const S& qd) {
  return -(j.stiffness * q) - (j.damping * qd);
}

// Forward dynamics via the articulated-body algorithm. tau is the applied
// generalized force (stiffness/damping are folded in internally); f_ext
// holds one spatial force per link about the world origin, world coordinates.
//
// Pass structure: outward velocities, inward articulated inertias, outward
// accelerations.
template <class S>
std::vector<S> forward_dynamics_aba(
    const MultiBody<S>& m, const JointState<S>& state, const std::vector<S>& tau,
    const std::vector<SpatialForce<S>>& f_ext = {}) {
  const int n = m.link_count();
  if (static_cast<int>(tau.size()) != m.dof())
    throw ArgumentError("forward dynamics: tau length != dof count");
  if (!f_ext.empty() && static_cast<int>(f_ext.size()) != n)
    throw ArgumentError("forward dynamics: f_ext length != link count");

  std::vector<SpatialTransform<S>> X(n), Xw(n);
  std::vector<SpatialMotion<S>> v(n), c(n);
  std::vector<Mat66<S>> IA(n);
  std::vector<SpatialForce<S>> pA(n);
  std::vector<std::vector<SpatialMotion<S>>> Smat(n);
  std::vector<std::vector<SpatialForce<S>>> U(n);
  std::vector<S> D(n), u(n);  // 1-dof working storage

  // outward: velocities and bias terms
  for (int i = 0; i < n; ++i) {
    const auto& joint = m.joints[static_cast<std::size_t>(i)];
    X[i] = joint_transform(joint, state.q);
    Xw[i] = joint.parent >= 0 ? X[i] * Xw[joint.parent] : X[i];
    motion_subspace(joint, Smat[i]);

    SpatialMotion<S> vj = SpatialMotion<S>::zero();
    for (int d = 0; d < joint.dof(); ++d)
      vj += Smat[i][static_cast<std::size_t>(d)] *
            state.qd[static_cast<std::size_t>(joint.qd_index + d)];
    v[i] = joint.parent >= 0 ? X[i].apply(v[joint.parent]) + vj : vj;
    c[i] = cross_motion(v[i], vj);

    const auto& I = m.links[static_cast<std::size_t>(i)].inertia;
    IA[i] = Mat66<S>::from_inertia(I);
    pA[i] = cross_force(v[i], I.apply(v[i]));
    if (!f_ext.empty())
      pA[i] -= Xw[i].apply(f_ext[static_cast<std::size_t>(i)]);
  }

  // inward: articulated inertias
  for (int i = n - 1; i >= 0; --i) {
    const auto& joint = m.joints[static_cast<std::size_t>(i)];
    const int nd = joint.dof();
    if (nd == 1) {
      const S q = state.q[static_cast<std::size_t>(joint.q_index)];
      const S qd = state.qd[static_cast<std::size_t>(joint.qd_index)];
      U[i].push_back(IA[i].apply(Smat[i][0]));
      D[static_cast<std::size_t>(i)] = pair(U[i][0], Smat[i][0]);
      u[static_cast<std::size_t>(i)] =
          tau[static_cast<std::size_t>(joint.qd_index)] +
          passive_joint_force(joint, q, qd) - pair(pA[i], Smat[i][0]);
      if (std::abs(primal(D[static_cast<std::size_t>(i)])) < 1e-12)
        throw DynamicsError("singular articulated inertia at joint '" +
                                joint.name + "'",
                            i);
    } else if (nd == 6) {
      for (int d = 0; d < 6; ++d)
        U[i].push_back(IA[i].apply(Smat[i][static_cast<std::size_t>(d)]));
    }
    if (joint.parent >= 0) {
      Mat66<S> Ia = IA[i];
      SpatialForce<S> pa = pA[i];
      if (nd == 1) {
        const S dinv = S(1.0) / D[static_cast<std::size_t>(i)];
        // Ia -= U U^T / D
        std::array<S, 6> ucol{U[i][0].torque.x, U[i][0].torque.y,
                              U[i][0].torque.z, U[i][0].force.x,
                              U[i][0].force.y, U[i][0].force.z};
        for (int r = 0; r < 6; ++r)
          for (int col = 0; col < 6; ++col)
            Ia(r, col) -= ucol[static_cast<std::size_t>(r)] *
                          ucol[static_cast<std::size_t>(col)] * dinv;
        pa += Ia.apply(c[i]) + U[i][0] * (u[static_cast<std::size_t>(i)] * dinv);
      } else {
        // fixed joint: no subspace to project out
        pa += Ia.apply(c[i]);
      }
      IA[joint.parent] = IA[joint.parent] + inertia_to_parent(X[i], Ia);
      pA[joint.parent] += X[i].apply_inverse(pa);
    }
  }

  // outward: accelerations
  std::vector<S> qdd(static_cast<std::size_t>(m.dof()), S(0.0));
  std::vector<SpatialMotion<S>> a(n);
  const SpatialMotion<S> a0{Vec3<S>::zero(), -m.gravity};
  for (int i = 0; i < n; ++i) {
    const auto& joint = m.joints[static_cast<std::size_t>(i)];
    const SpatialMotion<S> ap =
        (joint.parent >= 0 ? X[i].apply(a[joint.parent]) : X[i].apply(a0)) +
        c[i];
    const int nd = joint.dof();
    if (nd == 1) {
      const S qdd_i = (u[static_cast<std::size_t>(i)] - pair(U[i][0], ap)) /
                      D[static_cast<std::size_t>(i)];
      qdd[static_cast<std::size_t>(joint.qd_index)] = qdd_i;
      a[i] = ap + Smat[i][0] * qdd_i;
    } else if (nd == 6) {
      // free joint at the root: solve the dense 6x6 joint-space system
      DMat<S> Df(6, 6);
      for (int r = 0; r < 6; ++r)
        for (int col = 0; col < 6; ++col)
          Df(r, col) = pair(U[i][static_cast<std::size_t>(col)],
                            Smat[i][static_cast<std::size_t>(r)]);
      std::vector<S> rhs(6);
      for (int d = 0; d < 6; ++d)
        rhs[static_cast<std::size_t>(d)] =
            tau[static_cast<std::size_t>(joint.qd_index + d)] -
            pair(pA[i], Smat[i][static_cast<std::size_t>(d)]) -
            pair(U[i][static_cast<std::size_t>(d)], ap);
      if (!Df.ldlt_factor())
        throw DynamicsError(
            "singular articulated inertia at joint '" + joint.name + "'", i);
      const auto sol = Df.ldlt_solve(std::move(rhs));
      a[i] = ap;
      for (int d = 0; d < 6; ++d) {
        qdd[static_cast<std::size_t>(joint.qd_index + d)] =
            sol[static_cast<std::size_t>(d)];
        a[i] += Smat[i][static_cast<std::size_t>(d)] *
                sol[static_cast<std::size_t>(d)];
      }
    } else {
      a[i] = ap;
    }
  }
  return qdd;
}

// Recursive Newton-Euler inverse dynamics: the applied generalized force
// that produces qdd at the given state (passive stiffness/damping unfolded,
// so it is the exact inverse of forward_dynamics_aba).
template <class S>
std::vector<S> inverse_dynamics(
    const MultiBody<S>& m, const JointState<S>& state, const std::vector<S>& qdd,
    const std::vector<SpatialForce<S>>& f_ext = {}) {
  const int n = m.link_count();
  if (static_cast<int>(qdd.size()) != m.dof())
    throw ArgumentError("inverse dynamics: qdd length != dof count");
  if (!f_ext.empty() && static_cast<int>(f_ext.size()) != n)
    throw ArgumentError("inverse dynamics: f_ext length != link count");

  std::vector<SpatialTransform<S>> X(n), Xw(n);
  std::vector<SpatialMotion<S>> v(n), a(n);
  std::vector<SpatialForce<S>> f(n);
  std::vector<std::vector<SpatialMotion<S>>> Smat(n);
  const SpatialMotion<S> a0{Vec3<S>::zero(), -m.gravity};

  for (int i = 0; i < n; ++i) {
    const auto& joint = m.joints[static_cast<std::size_t>(i)];
    X[i] = joint_transform(joint, state.q);
    Xw[i] = joint.parent >= 0 ? X[i] * Xw[joint.parent] : X[i];
    motion_subspace(joint, Smat[i]);

    SpatialMotion<S> vj = SpatialMotion<S>::zero();
    SpatialMotion<S> aj = SpatialMotion<S>::zero();
    for (int d = 0; d < joint.dof(); ++d) {
      vj += Smat[i][static_cast<std::size_t>(d)] *
            state.qd[static_cast<std::size_t>(joint.qd_index + d)];
      aj += Smat[i][static_cast<std::size_t>(d)] *
            qdd[static_cast<std::size_t>(joint.qd_index + d)];
    }
    v[i] = joint.parent >= 0 ? X[i].apply(v[joint.parent]) + vj : vj;
    a[i] = (joint.parent >= 0 ? X[i].apply(a[joint.parent]) : X[i].apply(a0)) +
           cross_motion(v[i], vj) + aj;

    const auto& I = m.links[static_cast<std::size_t>(i)].inertia;
    f[i] = I.apply(a[i]) + cross_force(v[i], I.apply(v[i]));
    if (!f_ext.empty())
      f[i] -= Xw[i].apply(f_ext[static_cast<std::size_t>(i)]);
  }

  std::vector<S> tau(static_cast<std::size_t>(m.dof()), S(0.0));
  for (int i = n - 1; i >= 0; --i) {
    const auto& joint = m.joints[static_cast<std::size_t>(i)];
    for (int d = 0; d < joint.dof(); ++d)
      tau[static_cast<std::size_t>(joint.qd_index + d)] =
          pair(f[i], Smat[i][static_cast<std::size_t>(d)]);
    if (joint.dof() == 1) {
      const S q = state.q[static_cast<std::size_t>(joint.q_index)];
      const S qd = state.qd[static_cast<std::size_t>(joint.qd_index)];
      tau[static_cast<std::size_t>(joint.qd_index)] -=
          passive_joint_force(joint, q, qd);
    }
    if (joint.parent >= 0) f[joint.parent] += X[i].apply_inverse(f[i]);
  }
  return tau;
}

// Generalized inertia matrix built column-by-column from inverse dynamics
// with gravity off: H e_j = id(q, 0, e_j) - id(q, 0, 0).
template <class S>
DMat<S> mass_matrix(const MultiBody<S>& m, const std::vector<S>& q) {
  MultiBody<S> mg = m;
  mg.gravity = Vec3<S>::zero();
  JointState<S> s;
  s.q = q;
  s.qd.assign(static_cast<std::size_t>(m.dof()), S(0.0));

  const int n = m.dof();
  std::vector<S> zero(static_cast<std::size_t>(n), S(0.0));
  const auto bias = inverse_dynamics(mg, s, zero);
  DMat<S> H(n, n);
  std::vector<S> e(static_cast<std::size_t>(n), S(0.0));
  for (int j = 0; j < n; ++j) {
    e[static_cast<std::size_t>(j)] = S(1.0);
    const auto col = inverse_dynamics(mg, s, e);
    for (int i = 0; i < n; ++i)
      H(i, j) = col[static_cast<std::size_t>(i)] - bias[static_cast<std::size_t>(i)];
    e[static_cast<std::size_t>(j)] = S(0.0);
  }
  return H;
}

// World placement of a link: returns the transform carrying world
// coordinates into the link frame.
template <class S>
SpatialTransform<S> link_world_transform(const MultiBody<S>& m,
                                         const JointState<S>& state,
                                         int link) {
  SpatialTransform<S> X = SpatialTransform<S>::identity();
  int i = link;
  while (i >= 0) {
    X = X * joint_transform(m.joints[static_cast<std::size_t>(i)], state.q);
    i = m.joints[static_cast<std::size_t>(i)].parent;
  }
  return X;
}

// Spatial velocity of every link expressed in world coordinates (about the
// world origin).
template <class S>
std::vector<SpatialMotion<S>> link_world_velocities(
    const MultiBody<S>& m, const JointState<S>& state) {
  const int n = m.link_count();
  std::vector<SpatialTransform<S>> Xw(n);
  std::vector<SpatialMotion<S>> v(n), vw(n);
  std::vector<SpatialMotion<S>> Scols;
  for (int i = 0; i < n; ++i) {
    const auto& joint = m.joints[static_cast<std::size_t>(i)];
    const auto X = joint_transform(joint, state.q);
    Xw[i] = joint.parent >= 0 ? X * Xw[joint.parent] : X;
    motion_subspace(joint, Scols);
    SpatialMotion<S> vj = SpatialMotion<S>::zero();
    for (int d = 0; d < joint.dof(); ++d)
      vj += Scols[static_cast<std::size_t>(d)] *
            state.qd[static_cast<std::size_t>(joint.qd_index + d)];
    v[i] = joint.parent >= 0 ? X.apply(v[joint.parent]) + vj : vj;
    vw[i] = Xw[i].apply_inverse(v[i]);
  }
  return vw;
}

// Kinetic plus gravitational potential energy; the potential reference is
// the world origin.
template <class S>
S total_energy(const MultiBody<S>& m, const JointState<S>& state) {
  S e(0.0);
  const auto vw = link_world_velocities(m, state);
  for (int i = 0; i < m.link_count(); ++i) {
    const auto Xw = link_world_transform(m, state, i);
    const auto& I = m.links[static_cast<std::size_t>(i)].inertia;
    const auto v_local = Xw.apply(vw[static_cast<std::size_t>(i)]);
    e += I.energy(v_local);
    const Vec3<S> com_world = Xw.apply_point_inverse(I.com);
    e -= I.mass * dot(m.gravity, com_world);
  }
  return e;
}

}  // namespace diffsim
