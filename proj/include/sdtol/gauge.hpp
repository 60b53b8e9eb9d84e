#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sdtol/mmp.hpp"
#include "sdtol/optimizer.hpp"

namespace sdtol {

// Tolerance zone carried by a gauge. Location zones are fixed to the gauge at
// the nominal feature position; orientation zones additionally float along
// their measurement directions, so only angular defects can consume them.
struct ZoneSpec {
  enum class Type { location, orientation };
  Type type = Type::location;
  double width = 0;
};

inline const char* zone_type_name(ZoneSpec::Type t) {
  return t == ZoneSpec::Type::location ? "location" : "orientation";
}

// A perfect counterpart part: datum features that seat on the real (deviated)
// surfaces plus a tolerance zone around one toleranced feature.
struct VirtualGauge {
  std::vector<int> datums;  // part surface ids, hierarchy order (primary first)
  int toleranced = -1;
  ZoneSpec zone;
  bool manufacturing = false;  // names the residual mobilities lmg* instead of lg*
  std::string tag;             // unique per gauge; embedded in parameter names
};

struct AssembledGauge {
  Torsor motion;                          // gauge displacement vs nominal part
  std::vector<GapExpr> gaps;              // nonnegative <=> feature inside the zone
  std::vector<ParamId> mobility_params;   // residual datum-system freedoms
  std::vector<ParamId> zone_params;       // orientation-zone float offsets
  SetupDofAnalysis datum_analysis;
};

// Seat the gauge on the deviated datum features and express the zone gaps.
//
// The gauge position is one screw with six unknowns. Independent rows of the
// datum hierarchy (same analysis as part-holder positioning) become flush
// equations against the surfaces' deviation torsors; the complement is filled
// by the datum features' invariant-direction screws, each valued by a fresh
// mobility parameter: the standard's candidate datum frames.
inline AssembledGauge assemble_gauge(const MMP& mmp, const NominalPart& part,
                                     const VirtualGauge& g, ParameterRegistry& reg,
                                     const SampleConfig& sampling = {}) {
  if (g.datums.empty()) throw ResolutionError("gauge needs at least one datum surface");
  auto torsor_of = [&](int sid) -> const Torsor& {
    auto it = mmp.surfaces.find(sid);
    if (it == mmp.surfaces.end())
      throw ResolutionError("gauge references surface " + std::to_string(sid) +
                            " absent from the model state");
    return it->second;
  };

  SetUp datum_set;
  for (size_t i = 0; i < g.datums.size(); ++i) {
    ElementaryConnection c;
    c.part_surface = g.datums[i];
    c.rank = static_cast<int>(i) + 1;
    c.long_fit = i == 0;  // a primary cylinder datum orients as well as locates
    datum_set.connections.push_back(c);
  }

  AssembledGauge out;
  out.datum_analysis = analyze_setup_rows(part, datum_set);
  for (size_t i = 0; i < out.datum_analysis.connection_order.size(); ++i)
    if (out.datum_analysis.new_dofs_per_connection[i] == 0)
      throw ResolutionError(
          "datum surface " +
          std::to_string(datum_set
                             .connections[static_cast<size_t>(
                                 out.datum_analysis.connection_order[i])]
                             .part_surface) +
          " constrains nothing new in the gauge datum system");

  std::vector<Vec6> basis;
  auto consume = [&](Vec6 v) -> bool {
    const double norm0 = std::sqrt(dot6(v, v));
    if (norm0 == 0) return false;
    for (const Vec6& b : basis) {
      const double p = dot6(v, b);
      for (int i = 0; i < 6; ++i) v[i] -= p * b[i];
    }
    const double n = std::sqrt(dot6(v, v));
    if (n <= kRowIndependenceTol * norm0) return false;
    for (int i = 0; i < 6; ++i) v[i] /= n;
    basis.push_back(v);
    return true;
  };

  const ParamCategory cat = g.manufacturing ? ParamCategory::lmgp : ParamCategory::lgp;
  std::vector<ContactEquation> eqs;
  for (const DofEntry& e : out.datum_analysis.entries) {
    if (!e.independent) continue;
    consume(e.row);
    const int sid =
        datum_set.connections[static_cast<size_t>(e.connection_index)].part_surface;
    eqs.push_back({e.row, apply_screw_row(e.row, torsor_of(sid))});
  }
  for (size_t i = 0; i < g.datums.size() && eqs.size() < 6; ++i) {
    const Surface& s = part.surface(g.datums[i]);
    for (Kind k : invariant_kinds(s.cls)) {
      if (eqs.size() == 6) break;
      Vec6 row = screw_row(k, s.frame);
      if (!consume(row)) continue;
      DefectParameter p;
      p.kind = k;
      p.category = cat;
      p.surface = g.datums[i];
      p.name = gauge_link_name(cat, k, g.tag + "D" + std::to_string(g.datums[i]));
      const ParamId id = reg.add(std::move(p));
      out.mobility_params.push_back(id);
      eqs.push_back({row, LinExpr::param(id)});
    }
  }
  if (eqs.size() != 6)
    throw ResolutionError("gauge datum system leaves an unnamed freedom (rank " +
                          std::to_string(eqs.size()) + ")");
  out.motion = solve_screw(eqs);

  // ---- zone gaps --------------------------------------------------------------
  const Surface& ts = part.surface(g.toleranced);
  const Torsor& dev = torsor_of(g.toleranced);
  const double half = g.zone.width / 2;
  const bool floating_zone = g.zone.type == ZoneSpec::Type::orientation;

  auto zone_param = [&](Kind k) {
    DefectParameter p;
    p.kind = k;
    p.category = cat;
    p.surface = g.toleranced;
    p.name = zone_offset_name(cat, k, g.tag);
    const ParamId id = reg.add(std::move(p));
    out.zone_params.push_back(id);
    return id;
  };

  if (ts.cls == SurfaceClass::plane) {
    LinExpr offset;
    if (floating_zone) offset = LinExpr::param(zone_param(Kind::tz));
    const Vec3 n = ts.frame.axis_z();
    const auto pts = sample_points(ts, sampling);
    for (size_t k = 0; k < pts.size(); ++k) {
      LinExpr d = dot(n, dev.displacement_at(pts[k])) -
                  dot(n, out.motion.displacement_at(pts[k]));
      if (floating_zone) d -= offset;
      out.gaps.push_back({LinExpr::constant(half) - d, g.tag + ":v" + std::to_string(k) + "u"});
      out.gaps.push_back({LinExpr::constant(half) + d, g.tag + ":v" + std::to_string(k) + "l"});
    }
  } else {
    // Cylinder location: an annular zone on the surface of revolution, so the
    // radial reading is the axis offset plus the size deviation; a location
    // spec on a hole therefore also bounds its diameter. Orientation floats in
    // position (and implicitly size), constraining the axis tilt only. Both
    // probe the two end points over a discretized circle of directions.
    LinExpr ox, oy;
    if (floating_zone) {
      ox = LinExpr::param(zone_param(Kind::tx));
      oy = LinExpr::param(zone_param(Kind::ty));
    }
    const auto [z0, z1] = cylinder_extent(ts);
    const Vec3 ends[2] = {ts.frame.to_global({0, 0, z0}), ts.frame.to_global({0, 0, z1})};
    const Vec3 ax = ts.frame.axis_x(), ay = ts.frame.axis_y();
    const int K = sampling.cylinder_circle_count;
    for (int e = 0; e < 2; ++e) {
      const auto u_dev = dev.displacement_at(ends[e]);
      const auto u_g = out.motion.displacement_at(ends[e]);
      for (int k = 0; k < K; ++k) {
        const double th = 2.0 * M_PI * k / K;
        const Vec3 dir{std::cos(th) * ax.x + std::sin(th) * ay.x,
                       std::cos(th) * ax.y + std::sin(th) * ay.y,
                       std::cos(th) * ax.z + std::sin(th) * ay.z};
        LinExpr d = dot(dir, u_dev) - dot(dir, u_g);
        const std::string stem = g.tag + ":e" + std::to_string(e) + "t" + std::to_string(k);
        if (floating_zone) {
          d -= (ox * std::cos(th) + oy * std::sin(th));
          out.gaps.push_back({LinExpr::constant(half) - d, stem});
        } else {
          d += dev.radius();
          out.gaps.push_back({LinExpr::constant(half) - d, stem + "u"});
          out.gaps.push_back({LinExpr::constant(half) + d, stem + "l"});
        }
      }
    }
  }
  return out;
}

}  // namespace sdtol
