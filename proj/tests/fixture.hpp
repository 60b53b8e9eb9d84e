#pragma once

// Shared test geometry: a rectangular block with reference faces and a vertical
// bore, plus plan builders exercising slipping and floating connections.

#include <utility>
#include <vector>

#include "sdtol/gauge.hpp"
#include "sdtol/mmp.hpp"
#include "sdtol/problems.hpp"
#include "sdtol/process.hpp"

namespace testfix {

using namespace sdtol;

inline Surface plane_surface(int id, Vec3 origin, Vec3 ax, Vec3 ay, Vec3 az,
                             std::vector<Vec3> boundary) {
  Surface s;
  s.id = id;
  s.cls = SurfaceClass::plane;
  s.frame = {origin, Mat3{ax, ay, az}};
  s.boundary_local = std::move(boundary);
  return s;
}

inline Surface cylinder_surface(int id, Vec3 origin, Vec3 ax, Vec3 ay, Vec3 az, double radius,
                                double z0, double z1) {
  Surface s;
  s.id = id;
  s.cls = SurfaceClass::cylinder;
  s.frame = {origin, Mat3{ax, ay, az}};
  s.radius = radius;
  s.boundary_local = {
      {radius, 0, z0}, {0, radius, z0}, {-radius, 0, z0},
      {radius, 0, z1}, {0, radius, z1}, {-radius, 0, z1},
  };
  return s;
}

// Block occupying [0,20] x [0,20] x [0,10].
//   1: bottom face (normal -z)   2: face x = 0 (normal -x)
//   3: face y = 0 (normal -y), reference pad near the x = 0 edge
//   4: top face (normal +z)      8: vertical bore at (10, 10), radius 3
inline NominalPart block_part() {
  NominalPart p;
  p.global = {{0, 0, 0}, Mat3::identity()};
  p.surfaces.emplace(1, plane_surface(1, {0, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 0, -1},
                                      {{0, 0, 0}, {20, 0, 0}, {20, -20, 0}, {0, -20, 0}}));
  p.surfaces.emplace(2, plane_surface(2, {0, 10, 5}, {0, -1, 0}, {0, 0, 1}, {-1, 0, 0},
                                      {{-10, -5, 0}, {10, -5, 0}, {10, 5, 0}, {-10, 5, 0}}));
  p.surfaces.emplace(3, plane_surface(3, {0, 0, 5}, {1, 0, 0}, {0, 0, 1}, {0, -1, 0},
                                      {{0, -5, 0}, {20, -5, 0}, {20, 5, 0}, {0, 5, 0}}));
  p.surfaces.emplace(4, plane_surface(4, {10, 10, 10}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                      {{-10, -10, 0}, {10, -10, 0}, {10, 10, 0}, {-10, 10, 0}}));
  p.surfaces.emplace(8, cylinder_surface(8, {10, 10, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                         3.0, 0.0, 10.0));
  return p;
}

// Three slipping reference planes position the block; the top face is milled.
inline ProcessPlan three_plane_plan(bool float_side = false) {
  ProcessPlan plan;
  plan.part = block_part();
  plan.raw = {{1, {}}, {2, {}}, {3, {}}};
  SetUp su;
  su.id = 1;
  ElementaryConnection c1;
  c1.part_surface = 1;
  c1.rank = 1;
  ElementaryConnection c2;
  c2.part_surface = 2;
  c2.rank = 2;
  if (float_side) c2.contact = ContactType::floating;
  ElementaryConnection c3;
  c3.part_surface = 3;
  c3.rank = 3;
  su.connections = {c1, c2, c3};
  su.machining = {{4, {}}};
  plan.setups = {su};
  return plan;
}

// Bottom plane + floating bore + side pad; exercises clearance rows.
inline ProcessPlan bore_plan(double clearance) {
  ProcessPlan plan;
  plan.part = block_part();
  plan.raw = {{1, {}}, {3, {}}, {8, {}}};
  SetUp su;
  su.id = 1;
  ElementaryConnection c1;
  c1.part_surface = 1;
  c1.rank = 1;
  ElementaryConnection c8;
  c8.part_surface = 8;
  c8.rank = 2;
  c8.contact = ContactType::floating;
  c8.clearance = clearance;
  c8.part_is_bore = true;
  ElementaryConnection c3;
  c3.part_surface = 3;
  c3.rank = 3;
  su.connections = {c1, c8, c3};
  su.machining = {{4, {}}};
  plan.setups = {su};
  return plan;
}

// Plane from an explicit local x axis, normal, and GLOBAL corner list; the
// in-plane y axis completes a right-handed frame.
inline Surface plane_from_global(int id, Vec3 origin, Vec3 ax, Vec3 az,
                                 const std::vector<Vec3>& global_verts) {
  Surface s;
  s.id = id;
  s.cls = SurfaceClass::plane;
  s.frame = {origin, Mat3{ax, cross(az, ax), az}};
  for (const Vec3& v : global_verts) s.boundary_local.push_back(s.frame.to_local(v));
  return s;
}

inline std::map<Kind, Interval> plane_box(double rot, double trans) {
  return {{Kind::rx, {-rot, rot}}, {Kind::ry, {-rot, rot}}, {Kind::tz, {-trans, trans}}};
}

inline std::map<Kind, Interval> cylinder_box(double rot, double trans, double rad) {
  return {{Kind::rx, {-rot, rot}},
          {Kind::ry, {-rot, rot}},
          {Kind::tx, {-trans, trans}},
          {Kind::ty, {-trans, trans}},
          {Kind::ra, {-rad, rad}}};
}

// Four-set-up wedge: block [-40,40] x [-30,30] x [0,40] whose top is cut into a
// 30-degree inclined face (3) carrying a normal hole (4); later set-ups reface
// the +x end (5), mill a pocket floor (6), and skim the remaining top (7).
// Raw faces: bottom 1, top 2, y = -30 side 9, x = -40 side 10.
inline NominalPart wedge_part() {
  const double c30 = 0.8660254037844387;  // cos 30 deg
  const double s30 = 0.5;
  const Vec3 incline = {0, s30, c30};  // normal of face 3
  NominalPart p;
  p.global = {{0, 0, 0}, Mat3::identity()};
  p.surfaces.emplace(1, plane_from_global(1, {0, 0, 0}, {1, 0, 0}, {0, 0, -1},
                                          {{-40, -30, 0}, {40, -30, 0}, {40, 30, 0}, {-40, 30, 0}}));
  p.surfaces.emplace(2, plane_from_global(2, {0, 0, 40}, {1, 0, 0}, {0, 0, 1},
                                          {{-40, -30, 40}, {40, -30, 40}, {40, 30, 40}, {-40, 30, 40}}));
  p.surfaces.emplace(9, plane_from_global(9, {0, -30, 20}, {1, 0, 0}, {0, -1, 0},
                                          {{-40, -30, 0}, {40, -30, 0}, {40, -30, 40}, {-40, -30, 40}}));
  p.surfaces.emplace(10, plane_from_global(10, {-40, 0, 20}, incline, {-1, 0, 0},
                                           {{-40, -30, 0}, {-40, 30, 0}, {-40, 30, 40}, {-40, -30, 40}}));
  p.surfaces.emplace(3, plane_surface(3, {0, 0, 25}, {1, 0, 0}, {0, c30, -s30}, incline,
                                      {{-20, -15, 0}, {20, -15, 0}, {20, 15, 0}, {-20, 15, 0}}));
  p.surfaces.emplace(4, cylinder_surface(4, {0, 0, 25}, {1, 0, 0}, {0, c30, -s30}, incline,
                                         8.0, -15.0, 0.0));
  p.surfaces.emplace(5, plane_from_global(5, {40, 0, 20}, incline, {1, 0, 0},
                                          {{40, -30, 0}, {40, 30, 0}, {40, 30, 40}, {40, -30, 40}}));
  p.surfaces.emplace(6, plane_from_global(6, {0, 0, 12}, {1, 0, 0}, {0, 0, 1},
                                          {{-20, -30, 12}, {20, -30, 12}, {20, 30, 12}, {-20, 30, 12}}));
  p.surfaces.emplace(7, plane_from_global(7, {0, 0, 38}, {1, 0, 0}, {0, 0, 1},
                                          {{-40, -30, 38}, {40, -30, 38}, {40, 30, 38}, {-40, 30, 38}}));
  return p;
}

inline ProcessPlan wedge_plan() {
  const double rot = 2e-4, trans = 5e-3, rad = 2e-3;
  const auto pb = plane_box(rot, trans);
  const auto cb = cylinder_box(rot, trans, rad);
  ProcessPlan plan;
  plan.part = wedge_part();
  plan.raw = {{1, pb}, {2, pb}, {9, pb}, {10, pb}};

  auto slip = [&pb](int surface, int rank) {
    ElementaryConnection c;
    c.part_surface = surface;
    c.rank = rank;
    c.holder_bounds = pb;
    return c;
  };
  auto pin = [&cb](int rank) {
    ElementaryConnection c;
    c.part_surface = 4;
    c.rank = rank;
    c.contact = ContactType::floating;
    c.clearance = 0.04;
    c.part_is_bore = true;
    c.holder_bounds = cb;
    return c;
  };

  SetUp su1;
  su1.id = 1;
  su1.connections = {slip(2, 1), slip(10, 2), slip(9, 3)};
  su1.machining = {{3, pb}, {4, cb}};
  SetUp su2;
  su2.id = 2;
  su2.connections = {slip(3, 1), pin(2), slip(10, 3)};
  su2.machining = {{5, pb}};
  SetUp su3;
  su3.id = 3;
  su3.connections = {slip(3, 1), pin(2), slip(5, 3)};
  su3.machining = {{6, pb}};
  SetUp su4;
  su4.id = 4;
  su4.connections = {slip(6, 1), pin(2), slip(5, 3)};
  su4.machining = {{7, pb}};
  plan.setups = {su1, su2, su3, su4};
  return plan;
}

// One-parameter sizing stack: two point pads on the block top, machined in a
// deviation-free set-up, so only each pad's own normal offset reaches a gauge.
// `raw_top_tz` optionally declares the raw top face with a normal offset box;
// measuring from it then consumes functional budget no machining spec can
// recover, since raw deviations are never released.
inline ProcessPlan pad_plan(bool with_second_pad = false, double raw_top_tz = 0) {
  ProcessPlan plan;
  plan.part = block_part();
  plan.part.surfaces.emplace(
      11, plane_surface(11, {10, 10, 10}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {{0, 0, 0}}));
  plan.part.surfaces.emplace(
      12, plane_surface(12, {5, 5, 10}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {{0, 0, 0}}));

  const Interval zero{0, 0};
  std::map<Kind, Interval> frozen{{Kind::rx, zero}, {Kind::ry, zero}, {Kind::tz, zero}};
  plan.raw = {{1, frozen}, {2, frozen}, {3, frozen}};
  if (raw_top_tz > 0) {
    std::map<Kind, Interval> top = frozen;
    top[Kind::tz] = {-raw_top_tz, raw_top_tz};
    plan.raw.push_back({4, top});
  }

  SetUp su;
  su.id = 1;
  for (int rank = 1; rank <= 3; ++rank) {
    ElementaryConnection c;
    c.part_surface = rank;
    c.rank = rank;
    c.holder_bounds = frozen;
    su.connections.push_back(c);
  }
  su.machining = {{11, frozen}};
  if (with_second_pad) su.machining.push_back({12, frozen});
  plan.setups = {su};
  return plan;
}

inline VirtualGauge pad_functional(double width = 0.6) {
  VirtualGauge g;
  g.datums = {1};
  g.toleranced = 11;
  g.zone = {ZoneSpec::Type::location, width};
  g.tag = "G";
  return g;
}

// Functional requirement on the wedge: pocket floor 6 located to the bottom face.
inline VirtualGauge wedge_functional(double width = 0.6) {
  VirtualGauge g;
  g.datums = {1};
  g.toleranced = 6;
  g.zone = {ZoneSpec::Type::location, width};
  g.tag = "G";
  return g;
}

// A workable specification set for the wedge: the rule-based proposals with the
// set-up 1 datum frames completed by stop 9, which pins the y-slide those
// gauges would otherwise be blind to. Verified complete in test_synthesis.
inline std::vector<ManufacturingSpec> wedge_verified_specs(double width = 0.1) {
  return {
      {1, 3, {2, 10, 9}, {ZoneSpec::Type::location, width}},
      {1, 4, {2, 10, 9}, {ZoneSpec::Type::location, width}},
      {2, 5, {10}, {ZoneSpec::Type::orientation, width}},
      {3, 6, {3, 4, 5}, {ZoneSpec::Type::location, width}},
  };
}

}  // namespace testfix
