#pragma once

#include <vector>

#include "diffsim/multibody/dynamics.hpp"

namespace diffsim {

// Candidate contact between body_a and body_b (-1 = world or kinematic
// object). The normal points from a toward b; body_b is always a dynamic
// link.
template <class S>
struct ContactPoint {
  int body_a = -1;
  int body_b = -1;
  Vec3<S> point = Vec3<S>::zero();   // world
  Vec3<S> normal{S(0.0), S(0.0), S(1.0)};
  S penetration{0.0};                // >= 0 once touching
  S mu{0.5};
  S baumgarte_alpha{0.0};
  S baumgarte_beta{0.2};
  S cfm{0.0};
  Vec3<S> surface_velocity = Vec3<S>::zero();  // a-side velocity at the point
  ContactRoute route = ContactRoute::kNcp;
};

// Velocity-scripted collision sphere that is not part of the dynamic tree
// (e.g. a pusher tip driven at constant velocity).
template <class S>
struct KinematicSphere {
  Vec3<S> center = Vec3<S>::zero();
  S radius{0.0};
  Vec3<S> velocity = Vec3<S>::zero();
  ContactMaterial<S> material;
  ContactRoute route = ContactRoute::kNcp;
};

struct DetectOptions {
  double margin = 1e-3;  // emit candidates while overlap > -margin
};

namespace detail {

template <class S>
void combine_materials(const ContactMaterial<S>& a, const ContactMaterial<S>& b,
                       ContactPoint<S>& out) {
  using std::sqrt;
  out.mu = sqrt(a.mu * b.mu);
  out.baumgarte_alpha = (a.baumgarte_alpha + b.baumgarte_alpha) * S(0.5);
  out.baumgarte_beta = (a.baumgarte_beta + b.baumgarte_beta) * S(0.5);
  out.cfm = (a.cfm + b.cfm) * S(0.5);
}

inline ContactRoute combine_routes(ContactRoute a, ContactRoute b) {
  return (a == ContactRoute::kPenalty || b == ContactRoute::kPenalty)
             ? ContactRoute::kPenalty
             : ContactRoute::kNcp;
}

// plane vs. a sphere in world coordinates
template <class S>
void plane_vs_sphere(const Geometry<S>& plane, const Vec3<S>& center,
                     const S& radius, const ContactMaterial<S>& sphere_mat,
                     ContactRoute sphere_route, int link, double margin,
                     std::vector<ContactPoint<S>>& out) {
  const S dist = dot(plane.normal, center) - plane.plane_d;
  const S overlap = radius - dist;
  if (primal(overlap) <= -margin) return;
  ContactPoint<S> c;
  c.body_a = -1;
  c.body_b = link;
  c.normal = plane.normal;
  c.point = center - plane.normal * radius;
  c.penetration = smax(overlap, S(0.0));
  combine_materials(plane.material, sphere_mat, c);
  c.route = combine_routes(plane.route, sphere_route);
  out.push_back(std::move(c));
}

template <class S>
void plane_vs_grid_point(const Geometry<S>& plane, const Vec3<S>& p,
                         const ContactMaterial<S>& grid_mat,
                         ContactRoute grid_route, int link, double margin,
                         std::vector<ContactPoint<S>>& out) {
  const S overlap = plane.plane_d - dot(plane.normal, p);
  if (primal(overlap) <= -margin) return;
  ContactPoint<S> c;
  c.body_a = -1;
  c.body_b = link;
  c.normal = plane.normal;
  c.point = p;
  c.penetration = smax(overlap, S(0.0));
  combine_materials(plane.material, grid_mat, c);
  c.route = combine_routes(plane.route, grid_route);
  out.push_back(std::move(c));
}

// sphere (body a, possibly kinematic) vs. one grid point on link b
template <class S>
void sphere_vs_grid_point(const Vec3<S>& center, const S& radius,
                          const ContactMaterial<S>& sphere_mat,
                          ContactRoute sphere_route, int sphere_link,
                          const Vec3<S>& surface_velocity, const Vec3<S>& p,
                          const ContactMaterial<S>& grid_mat,
                          ContactRoute grid_route, int grid_link,
                          double margin, std::vector<ContactPoint<S>>& out) {
  const Vec3<S> delta = p - center;
  const S dist = norm(delta);
  if (primal(dist) < 1e-9) return;  // degenerate: point at the center
  const S overlap = radius - dist;
  if (primal(overlap) <= -margin) return;
  ContactPoint<S> c;
  c.body_a = sphere_link;
  c.body_b = grid_link;
  c.normal = delta * (S(1.0) / dist);
  c.point = p;
  c.penetration = smax(overlap, S(0.0));
  c.surface_velocity = surface_velocity;
  combine_materials(sphere_mat, grid_mat, c);
  c.route = combine_routes(sphere_route, grid_route);
  out.push_back(std::move(c));
}

}  // namespace detail

// Narrow-phase over the supported primitive pairs: plane-sphere,
// plane-point-grid, sphere-point-grid. Anything else raises
// UnsupportedPairError.
template <class S>
std::vector<ContactPoint<S>> detect_contacts(
    const MultiBody<S>& m, const JointState<S>& state,
    const std::vector<KinematicSphere<S>>& kinematics = {},
    const DetectOptions& options = {}) {
  std::vector<ContactPoint<S>> out;

  struct WorldGeom {
    const Geometry<S>* geom;
    int link;
    SpatialTransform<S> to_world;  // link -> world as point map inverse
  };
  std::vector<WorldGeom> dynamic_geoms;
  for (int i = 0; i < m.link_count(); ++i) {
    if (m.links[static_cast<std::size_t>(i)].geoms.empty()) continue;
    const auto Xw = link_world_transform(m, state, i);
    for (const auto& g : m.links[static_cast<std::size_t>(i)].geoms)
      dynamic_geoms.push_back({&g, i, Xw});
  }

  auto world_point = [](const WorldGeom& wg, const Vec3<S>& local) {
    return wg.to_world.apply_point_inverse(local);
  };

  // static environment vs. dynamic links
  for (const auto& wg : m.world_geoms) {
    if (wg.kind != GeomKind::kPlane)
      throw UnsupportedPairError(
          "contact: only planes are supported as world geometry");
    for (const auto& dg : dynamic_geoms) {
      if (dg.geom->kind == GeomKind::kSphere) {
        detail::plane_vs_sphere(wg, world_point(dg, dg.geom->offset),
                                dg.geom->radius, dg.geom->material,
                                dg.geom->route, dg.link, options.margin, out);
      } else if (dg.geom->kind == GeomKind::kPointGrid) {
        for (const auto& p : dg.geom->points)
          detail::plane_vs_grid_point(wg, world_point(dg, p),
                                      dg.geom->material, dg.geom->route,
                                      dg.link, options.margin, out);
      } else {
        throw UnsupportedPairError("contact: unsupported pair plane/plane");
      }
    }
  }

  // scripted spheres vs. dynamic links
  for (const auto& ks : kinematics) {
    for (const auto& dg : dynamic_geoms) {
      if (dg.geom->kind != GeomKind::kPointGrid)
        throw UnsupportedPairError(
            "contact: kinematic spheres only pair with point grids");
      for (const auto& p : dg.geom->points)
        detail::sphere_vs_grid_point(
            ks.center, ks.radius, ks.material, ks.route, -1, ks.velocity,
            world_point(dg, p), dg.geom->material, dg.geom->route, dg.link,
            options.margin, out);
    }
  }

  // dynamic-dynamic pairs
  for (std::size_t i = 0; i < dynamic_geoms.size(); ++i) {
    for (std::size_t j = i + 1; j < dynamic_geoms.size(); ++j) {
      const auto& a = dynamic_geoms[i];
      const auto& b = dynamic_geoms[j];
      if (a.link == b.link) continue;
      const Geometry<S>*sphere = nullptr, *grid = nullptr;
      const WorldGeom *sg = nullptr, *gg = nullptr;
      if (a.geom->kind == GeomKind::kSphere &&
          b.geom->kind == GeomKind::kPointGrid) {
        sphere = a.geom; grid = b.geom; sg = &a; gg = &b;
      } else if (b.geom->kind == GeomKind::kSphere &&
                 a.geom->kind == GeomKind::kPointGrid) {
        sphere = b.geom; grid = a.geom; sg = &b; gg = &a;
      } else {
        // sphere-sphere and grid-grid are out of scope; stay silent only
        // for non-overlapping broadphase? No broadphase here: reject.
        throw UnsupportedPairError(
            "contact: unsupported dynamic geometry pair");
      }
      const Vec3<S> center = sg->to_world.apply_point_inverse(sphere->offset);
      for (const auto& p : grid->points)
        detail::sphere_vs_grid_point(
            center, sphere->radius, sphere->material, sphere->route, sg->link,
            Vec3<S>::zero(), gg->to_world.apply_point_inverse(p),
            grid->material, grid->route, gg->link, options.margin, out);
    }
  }
  return out;
}

}  // namespace diffsim
