#pragma once

#include <string>
#include <vector>

#include "diffsim/multibody/model.hpp"

namespace diffsim {

struct UrdfResult {
  MultiBody<double> model;
  std::vector<std::string> warnings;  // tags seen but not modeled
};

// Parses the URDF subset: link (inertial, sphere/plane collisions), joint
// (revolute/continuous/prismatic/fixed/floating with origin, axis, dynamics
// damping). Anything else lands in `warnings`. Roots without an explicit
// world joint are welded to the world.
UrdfResult load_urdf(const std::string& xml_text);
UrdfResult load_urdf_file(const std::string& path);

}  // namespace diffsim
