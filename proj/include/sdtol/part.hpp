#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "sdtol/torsor.hpp"
#include "sdtol/vec.hpp"

namespace sdtol {

inline constexpr double kBoundaryTol = 1e-9;

// A nominal surface: placement frame plus a boundary polygon in local
// coordinates. Planes use local z as the outward normal and boundary vertices
// with z == 0. Cylinders use local z as the axis; boundary vertices sit on the
// wall (distance `radius` from the axis) and their z-range fixes the extent.
struct Surface {
  int id = -1;
  SurfaceClass cls = SurfaceClass::plane;
  Frame frame;
  std::vector<Vec3> boundary_local;
  double radius = 0;  // cylinders only
};

struct NominalPart {
  Frame global;  // part datum frame; identity placement by convention
  std::map<int, Surface> surfaces;

  const Surface& surface(int id) const {
    auto it = surfaces.find(id);
    if (it == surfaces.end()) throw Error("unknown surface " + std::to_string(id));
    return it->second;
  }
  bool has_surface(int id) const { return surfaces.count(id) != 0; }
};

struct ValidationIssue {
  std::string code;
  std::string message;
  int surface = -1;
  int setup = -1;
};

inline std::vector<ValidationIssue> validate_part(const NominalPart& part) {
  std::vector<ValidationIssue> issues;
  auto add = [&issues](const std::string& code, const std::string& msg, int sid) {
    issues.push_back({code, msg, sid, -1});
  };
  if (!is_orthonormal(part.global.basis) || !is_right_handed(part.global.basis))
    add("part.frame", "part global frame is not orthonormal right-handed", -1);
  for (const auto& [id, s] : part.surfaces) {
    const std::string sid = "surface " + std::to_string(id);
    if (s.id != id) add("surface.id", sid + ": key/id mismatch", id);
    if (!is_orthonormal(s.frame.basis))
      add("surface.frame", sid + ": frame basis is not orthonormal", id);
    else if (!is_right_handed(s.frame.basis))
      add("surface.frame", sid + ": frame basis is not right-handed", id);
    if (s.boundary_local.size() < 3)
      add("surface.boundary", sid + ": boundary needs at least 3 vertices", id);
    if (s.cls == SurfaceClass::plane) {
      for (const Vec3& v : s.boundary_local)
        if (std::abs(v.z) > kBoundaryTol) {
          add("plane.boundary", sid + ": boundary vertex off the plane (|z| > 1e-9)", id);
          break;
        }
      if (s.radius != 0) add("plane.radius", sid + ": planes carry no radius", id);
    } else {
      if (!(s.radius > 0)) add("cylinder.radius", sid + ": cylinder needs radius > 0", id);
      for (const Vec3& v : s.boundary_local) {
        const double r = std::hypot(v.x, v.y);
        if (std::abs(r - s.radius) > kBoundaryTol) {
          add("cylinder.boundary", sid + ": boundary vertex off the wall (1e-9)", id);
          break;
        }
      }
    }
  }
  return issues;
}

struct SampleConfig {
  int cylinder_circle_count = 8;  // points per end circle
};

// Global-coordinate probe points used for gaps and contact conditions.
// Planes: the boundary vertices (exact for a convex footprint under a linear
// displacement field). Cylinders: both end circles discretized.
inline std::vector<Vec3> sample_points(const Surface& s, const SampleConfig& cfg = {}) {
  std::vector<Vec3> pts;
  if (s.cls == SurfaceClass::plane) {
    pts.reserve(s.boundary_local.size());
    for (const Vec3& v : s.boundary_local) pts.push_back(s.frame.to_global(v));
    return pts;
  }
  double z0 = 0, z1 = 0;
  bool first = true;
  for (const Vec3& v : s.boundary_local) {
    if (first) {
      z0 = z1 = v.z;
      first = false;
    } else {
      z0 = std::min(z0, v.z);
      z1 = std::max(z1, v.z);
    }
  }
  const int n = std::max(3, cfg.cylinder_circle_count);
  pts.reserve(static_cast<size_t>(2 * n));
  for (double z : {z0, z1})
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * M_PI * k / n;
      pts.push_back(s.frame.to_global({s.radius * std::cos(th), s.radius * std::sin(th), z}));
    }
  return pts;
}

// Axial extent of a cylinder in local z, from its boundary vertices.
inline std::pair<double, double> cylinder_extent(const Surface& s) {
  double z0 = 0, z1 = 0;
  bool first = true;
  for (const Vec3& v : s.boundary_local) {
    if (first) {
      z0 = z1 = v.z;
      first = false;
    } else {
      z0 = std::min(z0, v.z);
      z1 = std::max(z1, v.z);
    }
  }
  return {z0, z1};
}

}  // namespace sdtol
