#pragma once

#include <string>
#include <vector>

#include "diffsim/error.hpp"
#include "diffsim/math/spatial.hpp"

namespace diffsim {

enum class JointKind { kRevolute, kPrismatic, kFixed, kFloating };

enum class GeomKind { kSphere, kPlane, kPointGrid };

// Which contact formulation a geometry prefers when it participates in a
// pair. Mixed scenes route plane contacts through the penalty model and
// pusher-style contacts through the impulse solver.
enum class ContactRoute { kNcp, kPenalty };

template <class S>
struct ContactMaterial {
  S mu{0.8};
  S baumgarte_alpha{0.0};
  S baumgarte_beta{0.2};
  S cfm{0.0};
};

template <class S>
struct Geometry {
  GeomKind kind = GeomKind::kSphere;
  S radius{0.0};                        // sphere
  Vec3<S> offset = Vec3<S>::zero();     // sphere center in the link frame
  Vec3<S> normal{S(0.0), S(0.0), S(1.0)};  // plane normal (world)
  S plane_d{0.0};                       // plane: dot(x, normal) = d
  std::vector<Vec3<S>> points;          // point grid, link frame
  ContactMaterial<S> material;
  ContactRoute route = ContactRoute::kNcp;

  static Geometry sphere(const S& radius, const Vec3<S>& offset) {
    Geometry g;
    g.kind = GeomKind::kSphere;
    g.radius = radius;
    g.offset = offset;
    return g;
  }
  static Geometry plane(const Vec3<S>& normal, const S& d) {
    Geometry g;
    g.kind = GeomKind::kPlane;
    g.normal = normal;
    g.plane_d = d;
    return g;
  }
  static Geometry point_grid(std::vector<Vec3<S>> points) {
    Geometry g;
    g.kind = GeomKind::kPointGrid;
    g.points = std::move(points);
    return g;
  }
};

template <class S>
struct Joint {
  JointKind kind = JointKind::kRevolute;
  int parent = -1;                                    // link index, -1 = world
  SpatialTransform<S> x_tree;                         // parent frame -> joint frame at q = 0
  Vec3<S> axis{S(0.0), S(1.0), S(0.0)};               // revolute/prismatic axis
  S stiffness{0.0};
  S damping{0.0};
  std::string name;
  int q_index = 0;   // assigned by MultiBody::finalize
  int qd_index = 0;

  int dof() const {
    switch (kind) {
      case JointKind::kFixed: return 0;
      case JointKind::kFloating: return 6;
      default: return 1;
    }
  }
  int q_size() const { return kind == JointKind::kFloating ? 7 : dof(); }
};

template <class S>
struct Link {
  SpatialInertia<S> inertia;
  std::vector<Geometry<S>> geoms;
  std::string name;
};

// Generalized state. For a floating joint the q slots hold a unit quaternion
// (w, x, y, z) followed by the world position; qd holds the body-frame
// angular then linear velocity.
template <class S>
struct JointState {
  std::vector<S> q;
  std::vector<S> qd;
  double time = 0.0;
};

// Kinematic tree of links and joints, one joint per link, parents preceding
// children. Immutable once finalized; rollouts copy state, not the model.
template <class S>
struct MultiBody {
  std::vector<Link<S>> links;
  std::vector<Joint<S>> joints;
  std::vector<Geometry<S>> world_geoms;  // static environment
  Vec3<S> gravity{S(0.0), S(0.0), S(-9.81)};

  int add_link(Link<S> link, Joint<S> joint) {
    if (joint.parent >= static_cast<int>(links.size()))
      throw ArgumentError("joint parent must precede child");
    links.push_back(std::move(link));
    joints.push_back(std::move(joint));
    finalize();
    return static_cast<int>(links.size()) - 1;
  }

  void finalize() {
    int q = 0, qd = 0;
    for (std::size_t i = 0; i < joints.size(); ++i) {
      if (joints[i].parent >= static_cast<int>(i))
        throw ArgumentError("links are not in tree order");
      joints[i].q_index = q;
      joints[i].qd_index = qd;
      q += joints[i].q_size();
      qd += joints[i].dof();
    }
    nq_ = q;
    dof_ = qd;
  }

  int dof() const { return dof_; }
  int nq() const { return nq_; }
  int link_count() const { return static_cast<int>(links.size()); }

  JointState<S> zero_state() const {
    JointState<S> s;
    s.q.assign(static_cast<std::size_t>(nq_), S(0.0));
    s.qd.assign(static_cast<std::size_t>(dof_), S(0.0));
    for (const auto& j : joints)
      if (j.kind == JointKind::kFloating)
        s.q[static_cast<std::size_t>(j.q_index)] = S(1.0);  // unit quaternion
    return s;
  }

 private:
  int dof_ = 0;
  int nq_ = 0;
};

// Joint placement: parent coordinates -> child coordinates at configuration q.
template <class S>
SpatialTransform<S> joint_transform(const Joint<S>& j,
                                    const std::vector<S>& q) {
  const auto qi = static_cast<std::size_t>(j.q_index);
  switch (j.kind) {
    case JointKind::kFixed:
      return j.x_tree;
    case JointKind::kRevolute: {
      const Mat3<S> R =
          Quat<S>::from_axis_angle(j.axis, q[qi]).to_matrix().transpose();
      return SpatialTransform<S>{R, Vec3<S>::zero()} * j.x_tree;
    }
    case JointKind::kPrismatic:
      return SpatialTransform<S>::translation(j.axis * q[qi]) * j.x_tree;
    case JointKind::kFloating: {
      const Quat<S> quat{q[qi], q[qi + 1], q[qi + 2], q[qi + 3]};
      const Vec3<S> pos{q[qi + 4], q[qi + 5], q[qi + 6]};
      return SpatialTransform<S>{quat.to_matrix().transpose(), pos} * j.x_tree;
    }
  }
  throw ArgumentError("unknown joint kind");
}

// Motion-subspace columns of a joint, expressed in the child frame.
template <class S>
void motion_subspace(const Joint<S>& j, std::vector<SpatialMotion<S>>& out) {
  out.clear();
  switch (j.kind) {
    case JointKind::kFixed:
      break;
    case JointKind::kRevolute:
      out.push_back({j.axis, Vec3<S>::zero()});
      break;
    case JointKind::kPrismatic:
      out.push_back({Vec3<S>::zero(), j.axis});
      break;
    case JointKind::kFloating:
      for (int k = 0; k < 6; ++k) {
        SpatialMotion<S> s = SpatialMotion<S>::zero();
        if (k < 3)
          s.angular[k] = S(1.0);
        else
          s.linear[k - 3] = S(1.0);
        out.push_back(s);
      }
      break;
  }
}

namespace detail {

inline std::pair<std::string, int> split_indexed_name(const std::string& name) {
  const auto lb = name.find('[');
  if (lb == std::string::npos) return {name, -1};
  const auto rb = name.find(']', lb);
  if (rb == std::string::npos)
    throw ArgumentError("malformed parameter name: " + name);
  return {name.substr(0, lb), std::stoi(name.substr(lb + 1, rb - lb - 1))};
}

template <class S>
Vec3<S> rescaled_to_length(const Vec3<S>& v, const S& length) {
  const double n = std::sqrt(primal(norm_squared(v)));
  if (n < 1e-12) return Vec3<S>{S(0.0), S(0.0), S(-1.0)} * length;
  return v * (length / S(n));
}

}  // namespace detail

// Named analytical-parameter access. Supported names:
//   link_mass[i], joint_damping[i], joint_stiffness[i],
//   link_com_x|y|z[i], joint_origin_x|y|z[i],
//   link_length[i]  (rescales link i's COM offset and the origin of joint
//                    i+1 to the given length, preserving their directions),
//   contact_mu, contact_alpha, contact_beta, contact_cfm  (all geometries).
template <class S>
void set_named_parameter(MultiBody<S>& m, const std::string& name,
                         const S& value) {
  const auto [base, idx] = detail::split_indexed_name(name);
  auto link_at = [&](int i) -> Link<S>& {
    if (i < 0 || i >= m.link_count())
      throw ArgumentError("parameter index out of range: " + name);
    return m.links[static_cast<std::size_t>(i)];
  };
  auto joint_at = [&](int i) -> Joint<S>& {
    if (i < 0 || i >= static_cast<int>(m.joints.size()))
      throw ArgumentError("parameter index out of range: " + name);
    return m.joints[static_cast<std::size_t>(i)];
  };
  if (base == "link_mass") {
    link_at(idx).inertia.mass = value;
  } else if (base == "joint_damping") {
    joint_at(idx).damping = value;
  } else if (base == "joint_stiffness") {
    joint_at(idx).stiffness = value;
  } else if (base == "link_com_x") {
    link_at(idx).inertia.com.x = value;
  } else if (base == "link_com_y") {
    link_at(idx).inertia.com.y = value;
  } else if (base == "link_com_z") {
    link_at(idx).inertia.com.z = value;
  } else if (base == "joint_origin_x") {
    joint_at(idx).x_tree.r.x = value;
  } else if (base == "joint_origin_y") {
    joint_at(idx).x_tree.r.y = value;
  } else if (base == "joint_origin_z") {
    joint_at(idx).x_tree.r.z = value;
  } else if (base == "link_length") {
    auto& link = link_at(idx);
    link.inertia.com = detail::rescaled_to_length(link.inertia.com, value);
    if (idx + 1 < static_cast<int>(m.joints.size())) {
      auto& next = m.joints[static_cast<std::size_t>(idx + 1)];
      next.x_tree.r = detail::rescaled_to_length(next.x_tree.r, value);
    }
  } else if (base == "contact_mu" || base == "contact_alpha" ||
             base == "contact_beta" || base == "contact_cfm") {
    auto assign = [&](ContactMaterial<S>& mat) {
      if (base == "contact_mu") mat.mu = value;
      else if (base == "contact_alpha") mat.baumgarte_alpha = value;
      else if (base == "contact_beta") mat.baumgarte_beta = value;
      else mat.cfm = value;
    };
    for (auto& link : m.links)
      for (auto& g : link.geoms) assign(g.material);
    for (auto& g : m.world_geoms) assign(g.material);
  } else {
    throw ArgumentError("unknown analytical parameter: " + name);
  }
}

template <class S>
S get_named_parameter(const MultiBody<S>& m, const std::string& name) {
  const auto [base, idx] = detail::split_indexed_name(name);
  auto link_at = [&](int i) -> const Link<S>& {
    if (i < 0 || i >= m.link_count())
      throw ArgumentError("parameter index out of range: " + name);
    return m.links[static_cast<std::size_t>(i)];
  };
  auto joint_at = [&](int i) -> const Joint<S>& {
    if (i < 0 || i >= static_cast<int>(m.joints.size()))
      throw ArgumentError("parameter index out of range: " + name);
    return m.joints[static_cast<std::size_t>(i)];
  };
  if (base == "link_mass") return link_at(idx).inertia.mass;
  if (base == "joint_damping") return joint_at(idx).damping;
  if (base == "joint_stiffness") return joint_at(idx).stiffness;
  if (base == "link_com_x") return link_at(idx).inertia.com.x;
  if (base == "link_com_y") return link_at(idx).inertia.com.y;
  if (base == "link_com_z") return link_at(idx).inertia.com.z;
  if (base == "joint_origin_x") return joint_at(idx).x_tree.r.x;
  if (base == "joint_origin_y") return joint_at(idx).x_tree.r.y;
  if (base == "joint_origin_z") return joint_at(idx).x_tree.r.z;
  if (base == "link_length") return norm(link_at(idx).inertia.com);
  if (base == "contact_mu" || base == "contact_alpha" ||
      base == "contact_beta" || base == "contact_cfm") {
    const ContactMaterial<S>* mat = nullptr;
    for (const auto& link : m.links)
      for (const auto& g : link.geoms) mat = &g.material;
    for (const auto& g : m.world_geoms) mat = &g.material;
    if (!mat) throw ArgumentError("model has no geometry: " + name);
    if (base == "contact_mu") return mat->mu;
    if (base == "contact_alpha") return mat->baumgarte_alpha;
    if (base == "contact_beta") return mat->baumgarte_beta;
    return mat->cfm;
  }
  throw ArgumentError("unknown analytical parameter: " + name);
}

namespace detail {

template <class T, class S>
Vec3<T> convert(const Vec3<S>& v) {
  return {T(primal(v.x)), T(primal(v.y)), T(primal(v.z))};
}
template <class T, class S>
Mat3<T> convert(const Mat3<S>& m) {
  Mat3<T> r;
  for (std::size_t i = 0; i < 9; ++i) r.m[i] = T(primal(m.m[i]));
  return r;
}

}  // namespace detail

// Re-types a model under another scalar realization; all current values
// become constants of the target type.
template <class T, class S>
MultiBody<T> convert_model(const MultiBody<S>& m) {
  MultiBody<T> out;
  out.gravity = detail::convert<T>(m.gravity);
  for (const auto& link : m.links) {
    Link<T> l;
    l.name = link.name;
    l.inertia.mass = T(primal(link.inertia.mass));
    l.inertia.com = detail::convert<T>(link.inertia.com);
    l.inertia.inertia = detail::convert<T>(link.inertia.inertia);
    for (const auto& g : link.geoms) {
      Geometry<T> gt;
      gt.kind = g.kind;
      gt.radius = T(primal(g.radius));
      gt.offset = detail::convert<T>(g.offset);
      gt.normal = detail::convert<T>(g.normal);
      gt.plane_d = T(primal(g.plane_d));
      for (const auto& p : g.points) gt.points.push_back(detail::convert<T>(p));
      gt.material.mu = T(primal(g.material.mu));
      gt.material.baumgarte_alpha = T(primal(g.material.baumgarte_alpha));
      gt.material.baumgarte_beta = T(primal(g.material.baumgarte_beta));
      gt.material.cfm = T(primal(g.material.cfm));
      gt.route = g.route;
      l.geoms.push_back(std::move(gt));
    }
    out.links.push_back(std::move(l));
  }
  for (const auto& j : m.joints) {
    Joint<T> jt;
    jt.kind = j.kind;
    jt.parent = j.parent;
    jt.x_tree.E = detail::convert<T>(j.x_tree.E);
    jt.x_tree.r = detail::convert<T>(j.x_tree.r);
    jt.axis = detail::convert<T>(j.axis);
    jt.stiffness = T(primal(j.stiffness));
    jt.damping = T(primal(j.damping));
    jt.name = j.name;
    out.joints.push_back(std::move(jt));
  }
  for (const auto& g : m.world_geoms) {
    Geometry<T> gt;
    gt.kind = g.kind;
    gt.radius = T(primal(g.radius));
    gt.offset = detail::convert<T>(g.offset);
    gt.normal = detail::convert<T>(g.normal);
    gt.plane_d = T(primal(g.plane_d));
    for (const auto& p : g.points) gt.points.push_back(detail::convert<T>(p));
    gt.material.mu = T(primal(g.material.mu));
    gt.material.baumgarte_alpha = T(primal(g.material.baumgarte_alpha));
    gt.material.baumgarte_beta = T(primal(g.material.baumgarte_beta));
    gt.material.cfm = T(primal(g.material.cfm));
    gt.route = g.route;
    out.world_geoms.push_back(std::move(gt));
  }
  out.finalize();
  return out;
}

template <class T, class S>
JointState<T> convert_state(const JointState<S>& s) {
  JointState<T> out;
  out.time = s.time;
  out.q.reserve(s.q.size());
  out.qd.reserve(s.qd.size());
  for (const auto& v : s.q) out.q.push_back(T(primal(v)));
  for (const auto& v : s.qd) out.qd.push_back(T(primal(v)));
  return out;
}

}  // namespace diffsim
