#pragma once

#include <map>
#include <utility>
#include <vector>

#include "sdtol/process.hpp"

namespace sdtol {

// ---- frame conversion helpers -------------------------------------------------

// Local components / local origin -> global components, sampled at the surface origin.
inline Torsor to_global_torsor(const Torsor& local, const Surface& s) {
  return local.with_components_mapped(s.frame.basis, "global").at_point(s.frame.origin);
}

// Global torsor -> components in the surface basis, sampled at the local origin.
inline Torsor to_local_torsor(const Torsor& global, const Surface& s) {
  return global.transport(s.frame.origin)
      .with_components_mapped(transposed(s.frame.basis), "surface:" + std::to_string(s.id))
      .at_point({0, 0, 0});
}

// Torsor of a surface's own deviation parameters, fetched from a prepared registry
// (unlike new_surface_torsor, which registers them). Global components.
inline Torsor surface_torsor_from_registry(const Surface& s, int setup, ParamCategory category,
                                           const ParameterRegistry& reg) {
  if (category != ParamCategory::dm && category != ParamCategory::dh)
    throw Error("surface_torsor_from_registry: only machining/holder categories");
  Torsor t = Torsor::zero({0, 0, 0}, "surface:" + std::to_string(s.id));
  for (Kind k : class_template(s.cls).free_kinds) {
    const std::string name =
        category == ParamCategory::dm ? dm_name(k, s.id) : dh_name(k, s.id, setup);
    const LinExpr term = LinExpr::param(reg.require(name));
    switch (k) {
      case Kind::rx: t.rotation(0) += term; break;
      case Kind::ry: t.rotation(1) += term; break;
      case Kind::rz: t.rotation(2) += term; break;
      case Kind::tx: t.translation(0) += term; break;
      case Kind::ty: t.translation(1) += term; break;
      case Kind::tz: t.translation(2) += term; break;
      case Kind::ra: t.radius() += term; break;
    }
  }
  return to_global_torsor(t, s);
}

// Zero a surface torsor's components along its invariance directions (in-plane slide
// and spin for planes, axial slide and spin for cylinders). These components are not
// observable on the real geometry, and no contact or zone expression reads them, so
// the stored model stays unique without changing any result.
inline Torsor canonicalize(const Torsor& global, const Surface& s) {
  Torsor loc = to_local_torsor(global, s);
  for (Kind k : invariant_kinds(s.cls)) {
    switch (k) {
      case Kind::rx: loc.rotation(0) = LinExpr(); break;
      case Kind::ry: loc.rotation(1) = LinExpr(); break;
      case Kind::rz: loc.rotation(2) = LinExpr(); break;
      case Kind::tx: loc.translation(0) = LinExpr(); break;
      case Kind::ty: loc.translation(1) = LinExpr(); break;
      case Kind::tz: loc.translation(2) = LinExpr(); break;
      case Kind::ra: loc.radius() = LinExpr(); break;
    }
  }
  return to_global_torsor(loc, s);
}

// ---- screw algebra on torsors ---------------------------------------------------

// Value a measurement row takes on a torsor (row written against the screw at the
// global origin).
inline LinExpr apply_screw_row(const Vec6& row, const Torsor& t) {
  const Torsor t0 = t.transport({0, 0, 0});
  LinExpr e;
  for (int i = 0; i < 3; ++i) {
    e += t0.rotation(i) * row[static_cast<size_t>(i)];
    e += t0.translation(i) * row[static_cast<size_t>(i) + 3];
  }
  return e;
}

inline LinExpr dot(const Vec3& n, const std::array<LinExpr, 3>& u) {
  return u[0] * n.x + u[1] * n.y + u[2] * n.z;
}

// One flush/link equation row_d(X) = rhs_d on the unknown screw X.
struct ContactEquation {
  Vec6 row{};
  LinExpr rhs;
};

// Solve six independent contact equations for the positioned body's screw.
inline Torsor solve_screw(const std::vector<ContactEquation>& eqs) {
  if (eqs.size() != 6)
    throw ResolutionError("positioning expects 6 equations, got " + std::to_string(eqs.size()));
  std::vector<std::vector<double>> a(6, std::vector<double>(6));
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) a[static_cast<size_t>(r)][static_cast<size_t>(c)] =
        eqs[static_cast<size_t>(r)].row[static_cast<size_t>(c)];
  std::vector<std::vector<double>> inv;
  try {
    inv = invert_dense(a);
  } catch (const Error&) {
    throw ResolutionError("positioning system is singular");
  }
  std::array<LinExpr, 6> xi;
  for (int c = 0; c < 6; ++c)
    for (int r = 0; r < 6; ++r)
      xi[static_cast<size_t>(c)] +=
          eqs[static_cast<size_t>(r)].rhs * inv[static_cast<size_t>(c)][static_cast<size_t>(r)];
  return Torsor({xi[0], xi[1], xi[2]}, {xi[3], xi[4], xi[5]}, {0, 0, 0}, "global");
}

// ---- non-penetration rows --------------------------------------------------------

// Unilateral contact rows for a floating connection. `link` is the torsor of the part
// surface relative to its holder counterpart; outward motion of a plane, or radial
// motion of a cylinder beyond the effective clearance, is penetration.
inline void append_contact_gaps(std::vector<LinearConstraint>& out, const Torsor& link,
                                const Surface& s, const ElementaryConnection& conn,
                                const LinExpr& part_ra, const LinExpr& holder_ra,
                                const SampleConfig& sampling, int setup) {
  const std::string stem =
      "chp_" + std::to_string(s.id) + "S" + std::to_string(setup);
  if (s.cls == SurfaceClass::plane) {
    const Vec3 n = s.frame.axis_z();
    int k = 0;
    for (const Vec3& v : s.boundary_local) {
      LinearConstraint c;
      c.expr = dot(n, link.displacement_at(s.frame.to_global(v)));
      c.sense = Sense::le;
      c.bound = 0;
      c.tag = ConstraintTag::chp;
      c.label = stem + ":v" + std::to_string(k++);
      c.setup = setup;
      out.push_back(c);
    }
    return;
  }
  const auto [z0, z1] = cylinder_extent(s);
  const LinExpr ra_play = conn.part_is_bore ? part_ra - holder_ra : holder_ra - part_ra;
  const int n_theta = std::max(3, sampling.cylinder_circle_count);
  int ei = 0;
  for (double z : {z0, z1}) {
    const auto u = link.displacement_at(s.frame.to_global({0, 0, z}));
    for (int k = 0; k < n_theta; ++k) {
      const double th = 2.0 * 3.14159265358979323846 * k / n_theta;
      const Vec3 e = s.frame.axis_x() * std::cos(th) + s.frame.axis_y() * std::sin(th);
      LinearConstraint c;
      c.expr = dot(e, u) - ra_play;
      c.sense = Sense::le;
      c.bound = conn.clearance;
      c.tag = ConstraintTag::chp;
      c.label = stem + ":e" + std::to_string(ei) + "t" + std::to_string(k);
      c.setup = setup;
      out.push_back(c);
    }
    ++ei;
  }
}

// ---- model of the manufactured part ----------------------------------------------

// Deviation model accumulated over the production run: per surface, the torsor of the
// real surface relative to the nominal part, plus the part's positioning screw per
// set-up and every unilateral/authored constraint gathered along the way.
struct MMP {
  std::map<int, Torsor> surfaces;
  std::map<int, int> produced_in;  // surface -> producing set-up (0 = raw)
  std::map<int, Torsor> part_motion;
  std::vector<LinearConstraint> constraints;
};

inline MMP build_mmp(const ProcessPlan& plan, const ParameterRegistry& reg) {
  MMP m;
  for (const auto& r : plan.raw) {
    const Surface& s = plan.part.surface(r.surface);
    m.surfaces.emplace(r.surface, surface_torsor_from_registry(s, 0, ParamCategory::dm, reg));
    m.produced_in[r.surface] = 0;
  }

  for (const auto& su : plan.setups) {
    const SetupDofAnalysis dof = analyze_setup_rows(plan.part, su);
    struct ContactRecord {
      const ElementaryConnection* conn;
      const Surface* surface;
      Torsor base;
      Torsor prior;
    };
    std::vector<ContactRecord> records;
    std::vector<ContactEquation> eqs;
    for (size_t oi = 0; oi < dof.connection_order.size(); ++oi) {
      const int ci = dof.connection_order[oi];
      const auto& conn = su.connections[static_cast<size_t>(ci)];
      const Surface& s = plan.part.surface(conn.part_surface);
      const Torsor base = surface_torsor_from_registry(s, su.id, ParamCategory::dh, reg);
      auto prior_it = m.surfaces.find(conn.part_surface);
      if (prior_it == m.surfaces.end())
        throw ResolutionError("set-up " + std::to_string(su.id) + ": surface " +
                              std::to_string(conn.part_surface) + " has no prior state");
      const Torsor& prior = prior_it->second;
      const Torsor diff = base - prior;
      for (const DofEntry& e : dof.entries) {
        if (e.connection_index != ci || !e.independent) continue;
        ContactEquation eq;
        eq.row = e.row;
        eq.rhs = apply_screw_row(e.row, diff);
        if (conn.contact == ContactType::floating)
          eq.rhs += LinExpr::param(reg.require(lhp_name(e.kind, conn.part_surface, su.id)));
        eqs.push_back(std::move(eq));
      }
      records.push_back({&conn, &s, base, prior});
    }
    if (eqs.size() != 6)
      throw ResolutionError("set-up " + std::to_string(su.id) + " constrains " +
                            std::to_string(eqs.size()) + " of 6 degrees of freedom");
    const Torsor x = solve_screw(eqs);
    m.part_motion.emplace(su.id, x);

    for (const ContactRecord& rec : records) {
      if (rec.conn->contact != ContactType::floating) continue;
      const Torsor link = (x + rec.prior) - rec.base;
      append_contact_gaps(m.constraints, link, *rec.surface, *rec.conn, rec.prior.radius(),
                          rec.base.radius(), plan.sampling, su.id);
    }

    for (const auto& op : su.machining) {
      const Surface& s = plan.part.surface(op.surface);
      const Torsor d = surface_torsor_from_registry(s, su.id, ParamCategory::dm, reg);
      m.surfaces.emplace(op.surface, canonicalize(d - x, s));
      m.produced_in[op.surface] = su.id;
    }

    for (const auto& nc : su.constraints) {
      LinearConstraint c = resolve_constraint(nc, reg);
      c.setup = su.id;
      m.constraints.push_back(std::move(c));
    }
  }
  return m;
}

// State of the part right after `setup` finished: only surfaces that exist by then.
// Constraint rows keep their full-run meaning and are not filtered here.
inline MMP truncated_at(const MMP& m, int setup) {
  MMP out;
  for (const auto& [sid, prod] : m.produced_in) {
    if (prod > setup) continue;
    out.surfaces.emplace(sid, m.surfaces.at(sid));
    out.produced_in[sid] = prod;
  }
  for (const auto& [j, x] : m.part_motion)
    if (j <= setup) out.part_motion.emplace(j, x);
  out.constraints = m.constraints;
  return out;
}

}  // namespace sdtol
