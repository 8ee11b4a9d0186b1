#include "diffsim/multibody/urdf.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "diffsim/error.hpp"

namespace diffsim {
namespace {

namespace pt = boost::property_tree;

using V3 = Vec3<double>;
using M3 = Mat3<double>;

V3 parse_vec3(const std::string& text, const char* what) {
  std::istringstream is(text);
  V3 v;
  if (!(is >> v.x >> v.y >> v.z))
    throw ParseError(std::string("urdf: malformed 3-vector in ") + what +
                     ": '" + text + "'");
  return v;
}

M3 rpy_matrix(const V3& rpy) {
  const double cr = std::cos(rpy.x), sr = std::sin(rpy.x);
  const double cp = std::cos(rpy.y), sp = std::sin(rpy.y);
  const double cy = std::cos(rpy.z), sy = std::sin(rpy.z);
  // R = Rz(yaw) * Ry(pitch) * Rx(roll), body-to-parent
  M3 r;
  r.m = {cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
         sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
         -sp,     cp * sr,                cp * cr};
  return r;
}

struct Origin {
  V3 xyz = V3::zero();
  V3 rpy = V3::zero();
};

Origin parse_origin(const pt::ptree& node) {
  Origin o;
  if (auto attr = node.get_child_optional("<xmlattr>")) {
    if (auto xyz = attr->get_optional<std::string>("xyz"))
      o.xyz = parse_vec3(*xyz, "origin xyz");
    if (auto rpy = attr->get_optional<std::string>("rpy"))
      o.rpy = parse_vec3(*rpy, "origin rpy");
  }
  return o;
}

struct RawJoint {
  std::string name, type, parent, child;
  Origin origin;
  V3 axis{0.0, 1.0, 0.0};
  double damping = 0.0;
};

struct RawLink {
  std::string name;
  double mass = 0.0;
  Origin inertial_origin;
  std::array<double, 6> inertia{};  // ixx iyy izz ixy ixz iyz
  std::vector<Geometry<double>> geoms;
  std::vector<Geometry<double>> planes;  // world-attached
};

}  // namespace

UrdfResult load_urdf(const std::string& xml_text) {
  pt::ptree tree;
  std::istringstream is(xml_text);
  try {
    pt::read_xml(is, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(std::string("urdf: xml parse failure: ") + e.what());
  }
  auto robot = tree.get_child_optional("robot");
  if (!robot) throw ParseError("urdf: missing <robot> root element");

  UrdfResult result;
  auto& warnings = result.warnings;
  std::vector<RawLink> raw_links;
  std::map<std::string, int> link_index;
  std::vector<RawJoint> raw_joints;

  for (const auto& [tag, node] : *robot) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
    if (tag == "link") {
      RawLink link;
      link.name = node.get<std::string>("<xmlattr>.name", "");
      if (link.name.empty()) throw ParseError("urdf: link without a name");
      if (auto inertial = node.get_child_optional("inertial")) {
        link.mass = inertial->get<double>("mass.<xmlattr>.value", 0.0);
        if (auto o = inertial->get_child_optional("origin"))
          link.inertial_origin = parse_origin(*o);
        if (auto in = inertial->get_child_optional("inertia")) {
          link.inertia = {in->get<double>("<xmlattr>.ixx", 0.0),
                          in->get<double>("<xmlattr>.iyy", 0.0),
                          in->get<double>("<xmlattr>.izz", 0.0),
                          in->get<double>("<xmlattr>.ixy", 0.0),
                          in->get<double>("<xmlattr>.ixz", 0.0),
                          in->get<double>("<xmlattr>.iyz", 0.0)};
        }
      }
      for (const auto& [ctag, cnode] : node) {
        if (ctag == "collision") {
          Origin origin;
          if (auto o = cnode.get_child_optional("origin"))
            origin = parse_origin(*o);
          auto geom = cnode.get_child_optional("geometry");
          if (!geom) continue;
          if (auto sphere = geom->get_child_optional("sphere")) {
            auto g = Geometry<double>::sphere(
                sphere->get<double>("<xmlattr>.radius", 0.0), origin.xyz);
            link.geoms.push_back(std::move(g));
          } else if (auto plane = geom->get_child_optional("plane")) {
            V3 n{0.0, 0.0, 1.0};
            if (auto ns = plane->get_optional<std::string>("<xmlattr>.normal"))
              n = parse_vec3(*ns, "plane normal");
            const double nn = std::sqrt(dot(n, n));
            n = n * (1.0 / (nn > 0.0 ? nn : 1.0));
            link.planes.push_back(
                Geometry<double>::plane(n, dot(n, origin.xyz)));
          } else {
            warnings.push_back("link '" + link.name +
                               "': unsupported collision geometry skipped");
          }
        } else if (ctag == "visual" || ctag == "material") {
          warnings.push_back("link '" + link.name + "': <" + ctag +
                             "> ignored");
        }
      }
      link_index[link.name] = static_cast<int>(raw_links.size());
      raw_links.push_back(std::move(link));
    } else if (tag == "joint") {
      RawJoint j;
      j.name = node.get<std::string>("<xmlattr>.name", "");
      j.type = node.get<std::string>("<xmlattr>.type", "");
      j.parent = node.get<std::string>("parent.<xmlattr>.link", "");
      j.child = node.get<std::string>("child.<xmlattr>.link", "");
      if (auto o = node.get_child_optional("origin")) j.origin = parse_origin(*o);
      if (auto axis = node.get_optional<std::string>("axis.<xmlattr>.xyz"))
        j.axis = parse_vec3(*axis, "joint axis");
      j.damping = node.get<double>("dynamics.<xmlattr>.damping", 0.0);
      const double an = std::sqrt(dot(j.axis, j.axis));
      if (an > 0.0) j.axis = j.axis * (1.0 / an);
      raw_joints.push_back(std::move(j));
    } else {
      warnings.push_back("<" + tag + "> ignored");
    }
  }

  // validate references and tree structure
  std::map<std::string, std::vector<int>> children;  // parent name -> joints
  std::set<std::string> child_links;
  for (std::size_t k = 0; k < raw_joints.size(); ++k) {
    const auto& j = raw_joints[k];
    if (j.parent != "world" && !link_index.count(j.parent))
      throw ParseError("urdf: joint '" + j.name + "' cites unknown link '" +
                       j.parent + "'");
    if (!link_index.count(j.child))
      throw ParseError("urdf: joint '" + j.name + "' cites unknown link '" +
                       j.child + "'");
    if (child_links.count(j.child))
      throw UnsupportedStructureError(
          "urdf: link '" + j.child +
          "' has multiple parent joints (kinematic loop)");
    child_links.insert(j.child);
    children[j.parent].push_back(static_cast<int>(k));
  }

  auto make_joint_kind = [&](const RawJoint& j) {
    if (j.type == "revolute" || j.type == "continuous") return JointKind::kRevolute;
    if (j.type == "prismatic") return JointKind::kPrismatic;
    if (j.type == "fixed") return JointKind::kFixed;
    if (j.type == "floating") return JointKind::kFloating;
    throw ParseError("urdf: joint '" + j.name + "' has unsupported type '" +
                     j.type + "'");
  };

  MultiBody<double>& model = result.model;
  std::map<std::string, int> model_index;  // urdf link name -> model link id
  std::set<std::string> visited;

  // depth-first placement, file order among siblings
  struct Pending {
    std::string link;
    int model_parent;
    std::optional<int> via_joint;
  };
  std::vector<Pending> stack;
  for (auto it = raw_links.rbegin(); it != raw_links.rend(); ++it)
    if (!child_links.count(it->name) && !children.count("world"))
      stack.push_back({it->name, -1, std::nullopt});
  if (children.count("world")) {
    const auto& world_joints = children["world"];
    for (auto it = world_joints.rbegin(); it != world_joints.rend(); ++it)
      stack.push_back({raw_joints[static_cast<std::size_t>(*it)].child, -1, *it});
    // plus any root links not hung off the world joint
    for (auto it = raw_links.rbegin(); it != raw_links.rend(); ++it)
      if (!child_links.count(it->name)) {
        bool via_world = false;
        for (int jk : world_joints)
          if (raw_joints[static_cast<std::size_t>(jk)].child == it->name)
            via_world = true;
        if (!via_world) stack.push_back({it->name, -1, std::nullopt});
      }
  }

  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    if (visited.count(p.link))
      throw UnsupportedStructureError("urdf: kinematic loop through link '" +
                                      p.link + "'");
    visited.insert(p.link);
    const RawLink& raw = raw_links[static_cast<std::size_t>(link_index[p.link])];

    Link<double> link;
    link.name = raw.name;
    link.inertia.mass = raw.mass;
    link.inertia.com = raw.inertial_origin.xyz;
    const M3 R = rpy_matrix(raw.inertial_origin.rpy);
    M3 I;
    I.m = {raw.inertia[0], raw.inertia[3], raw.inertia[4],
           raw.inertia[3], raw.inertia[1], raw.inertia[5],
           raw.inertia[4], raw.inertia[5], raw.inertia[2]};
    link.inertia.inertia = R * I * R.transpose();
    link.geoms = raw.geoms;
    for (const auto& plane : raw.planes) model.world_geoms.push_back(plane);

    Joint<double> joint;
    if (p.via_joint) {
      const RawJoint& rj = raw_joints[static_cast<std::size_t>(*p.via_joint)];
      joint.kind = make_joint_kind(rj);
      joint.axis = rj.axis;
      joint.damping = rj.damping;
      joint.name = rj.name;
      joint.x_tree = {rpy_matrix(rj.origin.rpy).transpose(), rj.origin.xyz};
    } else {
      joint.kind = JointKind::kFixed;
      joint.name = raw.name + "_weld";
    }
    joint.parent = p.model_parent;
    const int id = model.add_link(std::move(link), std::move(joint));
    model_index[p.link] = id;

    if (auto it = children.find(p.link); it != children.end())
      for (auto jt = it->second.rbegin(); jt != it->second.rend(); ++jt)
        stack.push_back({raw_joints[static_cast<std::size_t>(*jt)].child, id, *jt});
  }

  for (const auto& [name, idx] : link_index)
    if (!visited.count(name))
      throw UnsupportedStructureError("urdf: link '" + name +
                                      "' is unreachable (kinematic loop)");
  model.finalize();
  return result;
}

UrdfResult load_urdf_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("urdf: cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_urdf(ss.str());
}

}  // namespace diffsim
