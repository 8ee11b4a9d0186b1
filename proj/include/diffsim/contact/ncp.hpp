#pragma once

#include <limits>
#include <string>
#include <vector>

#include "diffsim/contact/penalty.hpp"

namespace diffsim {

template <class S>
struct ContactImpulse {
  S normal{0.0};
  S tangent1{0.0};
  S tangent2{0.0};
};

template <class S>
struct NcpResult {
  std::vector<ContactImpulse<S>> impulses;
  std::vector<S> qd_post;            // velocities after impulse application
  double max_complementarity = 0.0;  // max |lambda_n * (v_n' + bias)|
  double min_separating_velocity = 0.0;
};

namespace detail {

// World-frame motion-subspace columns feeding a link, one entry per
// generalized velocity coordinate that moves it.
template <class S>
struct LinkJacobian {
  std::vector<int> dof;
  std::vector<SpatialMotion<S>> axis;  // world coordinates, world origin
};

template <class S>
LinkJacobian<S> link_jacobian(const MultiBody<S>& m, const JointState<S>& state,
                              int link) {
  LinkJacobian<S> J;
  std::vector<SpatialMotion<S>> cols;
  int i = link;
  while (i >= 0) {
    const auto& joint = m.joints[static_cast<std::size_t>(i)];
    const auto Xw = link_world_transform(m, state, i);
    motion_subspace(joint, cols);
    for (int d = joint.dof() - 1; d >= 0; --d) {
      J.dof.push_back(joint.qd_index + d);
      J.axis.push_back(Xw.apply_inverse(cols[static_cast<std::size_t>(d)]));
    }
    i = joint.parent;
  }
  return J;
}

}  // namespace detail

// Impulse-level contact solve: sequential projected Gauss-Seidel sweeps over
// the contact list, normal impulse first (projected to >= 0, Baumgarte bias
// and CFM regularization applied), then the tangential pair projected onto
// the Coulomb disk of radius mu * lambda_n.
//
// qd is the pre-solve (free) velocity; the returned qd_post includes all
// contact impulses. The solve is an unrolled fixed iteration trace, so
// gradients flow through every sweep.
template <class S>
NcpResult<S> solve_ncp_pgs(const std::vector<ContactPoint<S>>& contacts,
                           const MultiBody<S>& m, const JointState<S>& state,
                           const std::vector<S>& qd, double dt,
                           int iterations = 50) {
  if (dt <= 0.0) throw ArgumentError("ncp: dt must be positive");
  if (iterations < 1) throw ArgumentError("ncp: iterations must be >= 1");
  const int n = m.dof();
  NcpResult<S> result;
  result.qd_post = qd;
  result.impulses.assign(contacts.size(), {});
  if (contacts.empty()) return result;

  auto H = mass_matrix(m, state.q);
  if (!H.ldlt_factor())
    throw SolverError("ncp: singular mass matrix");

  const int nc = static_cast<int>(contacts.size());
  // rows: per contact, 3 directions (n, t1, t2)
  std::vector<std::vector<S>> J(static_cast<std::size_t>(3 * nc),
                                std::vector<S>(static_cast<std::size_t>(n), S(0.0)));
  std::vector<std::vector<S>> W(static_cast<std::size_t>(3 * nc));
  std::vector<S> m_eff(static_cast<std::size_t>(3 * nc), S(0.0));
  std::vector<S> c0(static_cast<std::size_t>(3 * nc), S(0.0));
  std::vector<S> bias(static_cast<std::size_t>(nc), S(0.0));

  std::vector<detail::LinkJacobian<S>> link_jac(m.links.size());
  std::vector<bool> have_jac(m.links.size(), false);
  auto jac_for = [&](int link) -> const detail::LinkJacobian<S>& {
    if (!have_jac[static_cast<std::size_t>(link)]) {
      link_jac[static_cast<std::size_t>(link)] = detail::link_jacobian(m, state, link);
      have_jac[static_cast<std::size_t>(link)] = true;
    }
    return link_jac[static_cast<std::size_t>(link)];
  };

  for (int c = 0; c < nc; ++c) {
    const auto& cp = contacts[static_cast<std::size_t>(c)];
    Vec3<S> t1, t2;
    tangent_basis(cp.normal, t1, t2);
    const Vec3<S> dirs[3] = {cp.normal, t1, t2};
    for (int k = 0; k < 3; ++k) {
      auto& row = J[static_cast<std::size_t>(3 * c + k)];
      auto accumulate = [&](int link, double sign) {
        if (link < 0) return;
        const auto& lj = jac_for(link);
        for (std::size_t a = 0; a < lj.dof.size(); ++a) {
          const auto& ax = lj.axis[a];
          const S contrib =
              dot(dirs[k], ax.linear + cross(ax.angular, cp.point));
          row[static_cast<std::size_t>(lj.dof[a])] += S(sign) * contrib;
        }
      };
      accumulate(cp.body_b, 1.0);
      accumulate(cp.body_a, -1.0);
      // constant term from scripted surfaces on the a-side
      c0[static_cast<std::size_t>(3 * c + k)] =
          -dot(dirs[k], cp.surface_velocity);

      W[static_cast<std::size_t>(3 * c + k)] = H.ldlt_solve(row);
      S me(0.0);
      for (int d = 0; d < n; ++d)
        me += row[static_cast<std::size_t>(d)] *
              W[static_cast<std::size_t>(3 * c + k)][static_cast<std::size_t>(d)];
      m_eff[static_cast<std::size_t>(3 * c + k)] = me;
    }
    if (primal(m_eff[static_cast<std::size_t>(3 * c)]) < 1e-12)
      throw SolverError("ncp: zero effective mass at contact " +
                            std::to_string(c),
                        c);
    // Baumgarte position bias plus the reserved velocity-level alpha term
    S v_n0 = c0[static_cast<std::size_t>(3 * c)];
    for (int d = 0; d < n; ++d)
      v_n0 += J[static_cast<std::size_t>(3 * c)][static_cast<std::size_t>(d)] *
              qd[static_cast<std::size_t>(d)];
    bias[static_cast<std::size_t>(c)] =
        -(cp.baumgarte_beta * cp.penetration * S(1.0 / dt)) -
        cp.baumgarte_alpha * v_n0;
  }

  auto& v = result.qd_post;
  auto row_velocity = [&](int row) {
    S out = c0[static_cast<std::size_t>(row)];
    for (int d = 0; d < n; ++d)
      out += J[static_cast<std::size_t>(row)][static_cast<std::size_t>(d)] *
             v[static_cast<std::size_t>(d)];
    return out;
  };
  auto apply_impulse = [&](int row, const S& dl) {
    for (int d = 0; d < n; ++d)
      v[static_cast<std::size_t>(d)] +=
          W[static_cast<std::size_t>(row)][static_cast<std::size_t>(d)] * dl;
  };

  for (int it = 0; it < iterations; ++it) {
    for (int c = 0; c < nc; ++c) {
      const auto& cp = contacts[static_cast<std::size_t>(c)];
      auto& imp = result.impulses[static_cast<std::size_t>(c)];
      // normal direction
      {
        const int row = 3 * c;
        const S vn = row_velocity(row);
        const S denom = m_eff[static_cast<std::size_t>(row)] + cp.cfm;
        const S target = imp.normal - (vn + bias[static_cast<std::size_t>(c)] +
                                       cp.cfm * imp.normal) /
                                          denom;
        const S projected = smax(target, S(0.0));
        apply_impulse(row, projected - imp.normal);
        imp.normal = projected;
      }
      // friction pair projected onto the Coulomb disk
      {
        const int r1 = 3 * c + 1, r2 = 3 * c + 2;
        const S cand1 = imp.tangent1 - row_velocity(r1) / m_eff[static_cast<std::size_t>(r1)];
        const S cand2 = imp.tangent2 - row_velocity(r2) / m_eff[static_cast<std::size_t>(r2)];
        using std::sqrt;
        const S norm_t = sqrt(cand1 * cand1 + cand2 * cand2);
        const S bound = cp.mu * imp.normal;
        const S scale = select(norm_t - bound, bound / smax(norm_t, S(1e-12)),
                               S(1.0));
        const S new1 = cand1 * scale;
        const S new2 = cand2 * scale;
        apply_impulse(r1, new1 - imp.tangent1);
        apply_impulse(r2, new2 - imp.tangent2);
        imp.tangent1 = new1;
        imp.tangent2 = new2;
      }
    }
  }

  result.max_complementarity = 0.0;
  result.min_separating_velocity = std::numeric_limits<double>::infinity();
  for (int c = 0; c < nc; ++c) {
    const double vn = primal(row_velocity(3 * c));
    const double b = primal(bias[static_cast<std::size_t>(c)]);
    const double ln = primal(result.impulses[static_cast<std::size_t>(c)].normal);
    result.max_complementarity =
        std::max(result.max_complementarity, std::abs(ln * (vn + b)));
    result.min_separating_velocity =
        std::min(result.min_separating_velocity, vn);
  }
  return result;
}

}  // namespace diffsim
