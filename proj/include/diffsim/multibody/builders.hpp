#pragma once

#include <string>
#include <vector>

#include "diffsim/multibody/model.hpp"

// Programmatic model fixtures shared by experiments and tests. All chains
// hang along -z at q = 0 and swing in the x-z plane about +y axes.

namespace diffsim {

struct ChainSpec {
  std::vector<double> lengths;
  std::vector<double> masses;
  double damping = 0.0;
  double stiffness = 0.0;
  bool gravity = true;
};

// Serial chain of point masses on massless rods; joint i sits at the tip of
// link i-1.
template <class S = double>
MultiBody<S> build_chain(const ChainSpec& spec) {
  MultiBody<S> m;
  if (!spec.gravity) m.gravity = Vec3<S>::zero();
  for (std::size_t i = 0; i < spec.lengths.size(); ++i) {
    Link<S> link;
    link.name = "link" + std::to_string(i);
    link.inertia = SpatialInertia<S>::point_mass(
        S(spec.masses[i]), {S(0.0), S(0.0), S(-spec.lengths[i])});
    Joint<S> joint;
    joint.kind = JointKind::kRevolute;
    joint.axis = {S(0.0), S(1.0), S(0.0)};
    joint.parent = static_cast<int>(i) - 1;
    joint.name = "joint" + std::to_string(i);
    joint.damping = S(spec.damping);
    joint.stiffness = S(spec.stiffness);
    if (i > 0)
      joint.x_tree =
          SpatialTransform<S>::translation({S(0.0), S(0.0), S(-spec.lengths[i - 1])});
    m.add_link(std::move(link), std::move(joint));
  }
  return m;
}

template <class S = double>
MultiBody<S> build_pendulum(double length = 1.0, double mass = 1.0) {
  return build_chain<S>({{length}, {mass}});
}

template <class S = double>
MultiBody<S> build_double_pendulum(double l1 = 1.0, double l2 = 1.0,
                                   double m1 = 1.0, double m2 = 1.0,
                                   double damping = 0.0) {
  return build_chain<S>({{l1, l2}, {m1, m2}, damping});
}

// Two-link actuated chain in zero gravity; the drag-force experiments treat
// it as a planar swimmer whose medium the analytical model cannot see.
template <class S = double>
MultiBody<S> build_swimmer2(double length = 0.25, double mass = 0.5) {
  ChainSpec spec;
  spec.lengths = {length, length};
  spec.masses = {mass, mass};
  spec.gravity = false;
  return build_chain<S>(spec);
}

// Five-link chain whose link tips carry collision spheres above a ground
// plane; exercises the impulse contact path at benchmark scale.
template <class S = double>
MultiBody<S> build_chain5_ground(double mu = 0.6) {
  ChainSpec spec;
  spec.lengths = {0.3, 0.3, 0.3, 0.3, 0.3};
  spec.masses = {1.0, 1.0, 1.0, 1.0, 1.0};
  MultiBody<S> m = build_chain<S>(spec);
  for (std::size_t i = 0; i < m.links.size(); ++i) {
    auto g = Geometry<S>::sphere(S(0.05), {S(0.0), S(0.0), S(-0.3)});
    g.material.mu = S(mu);
    m.links[i].geoms.push_back(std::move(g));
  }
  // raise the chain base so the resting configuration touches the ground
  m.joints[0].x_tree =
      SpatialTransform<S>::translation({S(0.0), S(0.0), S(1.3)});
  m.world_geoms.push_back(Geometry<S>::plane({S(0.0), S(0.0), S(1.0)}, S(0.0)));
  m.finalize();
  return m;
}

struct BoxSpec {
  double half_x = 0.04;
  double half_y = 0.04;
  double half_z = 0.02;
  double mass = 0.2;
  double grid_resolution = 0.02;
  double mu = 0.5;
  ContactRoute ground_route = ContactRoute::kNcp;
};

// Floating box whose bottom face is sampled on a uniform point grid, resting
// over a world ground plane.
template <class S = double>
MultiBody<S> build_floating_box(const BoxSpec& spec) {
  MultiBody<S> m;
  Link<S> link;
  link.name = "box";
  const double mass = spec.mass;
  const double ix = mass / 3.0 * (spec.half_y * spec.half_y + spec.half_z * spec.half_z);
  const double iy = mass / 3.0 * (spec.half_x * spec.half_x + spec.half_z * spec.half_z);
  const double iz = mass / 3.0 * (spec.half_x * spec.half_x + spec.half_y * spec.half_y);
  link.inertia.mass = S(mass);
  link.inertia.com = Vec3<S>::zero();
  link.inertia.inertia = Mat3<S>::diagonal(S(ix), S(iy), S(iz));

  std::vector<Vec3<S>> pts;
  const int nx = static_cast<int>(2.0 * spec.half_x / spec.grid_resolution) + 1;
  const int ny = static_cast<int>(2.0 * spec.half_y / spec.grid_resolution) + 1;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      pts.push_back({S(-spec.half_x + i * spec.grid_resolution),
                     S(-spec.half_y + j * spec.grid_resolution),
                     S(-spec.half_z)});
  auto grid = Geometry<S>::point_grid(std::move(pts));
  grid.material.mu = S(spec.mu);
  grid.route = spec.ground_route;
  link.geoms.push_back(std::move(grid));

  Joint<S> joint;
  joint.kind = JointKind::kFloating;
  joint.parent = -1;
  joint.name = "free";
  m.add_link(std::move(link), std::move(joint));

  auto plane = Geometry<S>::plane({S(0.0), S(0.0), S(1.0)}, S(0.0));
  plane.material.mu = S(spec.mu);
  plane.route = spec.ground_route;
  m.world_geoms.push_back(std::move(plane));
  m.finalize();
  return m;
}

}  // namespace diffsim
