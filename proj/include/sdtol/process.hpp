#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdtol/part.hpp"

namespace sdtol {

enum class Sense { le, ge };

enum class ConstraintTag { cm, ch, chp, cgp, gap_mgp };

inline const char* constraint_tag_name(ConstraintTag t) {
  switch (t) {
    case ConstraintTag::cm: return "CM";
    case ConstraintTag::ch: return "CH";
    case ConstraintTag::chp: return "CHP";
    case ConstraintTag::cgp: return "CGP";
    case ConstraintTag::gap_mgp: return "GapMGP";
  }
  return "?";
}

struct LinearConstraint {
  LinExpr expr;
  Sense sense = Sense::le;
  double bound = 0;
  ConstraintTag tag = ConstraintTag::cm;
  std::string label;
  int setup = 0;  // set-up that introduced the row (0 = plan-wide)
};

// Joint constraint as authored in a plan file, by canonical parameter name;
// resolved against the registry once it exists.
struct NamedConstraint {
  std::map<std::string, double> coefficients;
  Sense sense = Sense::le;
  double bound = 0;
  ConstraintTag tag = ConstraintTag::cm;
  std::string label;
};

enum class ContactType { slipping, floating };

// One part-holder locating element. The holder's contact surface mirrors the
// part surface it mates (same nominal geometry); its own deviation parameters
// are registered per set-up with kind_iSj names. Floating cylinder contacts
// model a clearance fit (pin-in-hole); `part_is_bore` says which side is female.
struct ElementaryConnection {
  int part_surface = -1;
  int rank = 0;  // 1 = primary
  ContactType contact = ContactType::slipping;
  double clearance = 0;      // floating cylinders: nominal radial clearance
  bool part_is_bore = true;  // cylinders: part side is the hole
  bool long_fit = false;     // cylinders: engagement also constrains rx/ry
  std::map<Kind, Interval> holder_bounds;  // DH parameter boxes
};

struct MachiningOperation {
  int surface = -1;
  std::map<Kind, Interval> bounds;  // DM parameter boxes (capability)
};

struct SetUp {
  int id = 0;
  std::vector<ElementaryConnection> connections;  // any order; ranks decide
  std::vector<MachiningOperation> machining;
  std::vector<NamedConstraint> constraints;  // CM/CH/CHP joint rows
};

struct RawSurfaceDecl {
  int surface = -1;
  std::map<Kind, Interval> bounds;
};

struct ProcessPlan {
  NominalPart part;
  std::vector<RawSurfaceDecl> raw;  // never-machined surfaces with own deviations
  std::vector<SetUp> setups;        // production order
  SampleConfig sampling;
};

// ---- screw rows -------------------------------------------------------------

using Vec6 = std::array<double, 6>;  // (moment on rotation | direction on translation)

// Row extracting one torsor component in a contact frame: rotation kinds read
// axis . rotation; translation kinds read axis . u(origin), whose action on the
// torsor written at the global origin is (origin x axis) . rotation + axis . u0.
inline Vec6 screw_row(Kind k, const Frame& f) {
  int axis_index;
  bool rotational;
  switch (k) {
    case Kind::rx: axis_index = 0; rotational = true; break;
    case Kind::ry: axis_index = 1; rotational = true; break;
    case Kind::rz: axis_index = 2; rotational = true; break;
    case Kind::tx: axis_index = 0; rotational = false; break;
    case Kind::ty: axis_index = 1; rotational = false; break;
    case Kind::tz: axis_index = 2; rotational = false; break;
    default: throw Error("screw_row: ra has no screw direction");
  }
  const Vec3 axis = f.basis.column(axis_index);
  if (rotational) return {axis.x, axis.y, axis.z, 0, 0, 0};
  const Vec3 m = cross(f.origin, axis);
  return {m.x, m.y, m.z, axis.x, axis.y, axis.z};
}

inline double dot6(const Vec6& a, const Vec6& b) {
  double s = 0;
  for (int i = 0; i < 6; ++i) s += a[i] * b[i];
  return s;
}

// Kinds a contact nominally constrains, in canonical order.
inline std::vector<Kind> constrained_kinds(SurfaceClass cls, bool long_fit) {
  if (cls == SurfaceClass::plane) return {Kind::rx, Kind::ry, Kind::tz};
  if (long_fit) return {Kind::rx, Kind::ry, Kind::tx, Kind::ty};
  return {Kind::tx, Kind::ty};
}

// ---- hierarchy analysis -----------------------------------------------------

inline constexpr double kRowIndependenceTol = 1e-9;

struct DofEntry {
  int connection_index = -1;  // position in rank order
  Kind kind = Kind::rx;
  Vec6 row{};
  bool independent = false;
};

struct SetupDofAnalysis {
  std::vector<DofEntry> entries;            // connection rank order, kind order
  std::vector<int> connection_order;        // indices into SetUp::connections by rank
  std::vector<int> new_dofs_per_connection; // aligned with connection_order
  int rank = 0;
};

// Walk the connections in rank order; a direction is independent when its screw
// row is not spanned by the rows already consumed (modified Gram-Schmidt with a
// relative tolerance). Higher ranks win: their dependent directions are absorbed
// by the hierarchy instead of over-determining the part.
inline SetupDofAnalysis analyze_setup_rows(const NominalPart& part, const SetUp& setup) {
  SetupDofAnalysis out;
  out.connection_order.resize(setup.connections.size());
  for (size_t i = 0; i < setup.connections.size(); ++i) out.connection_order[i] = static_cast<int>(i);
  std::sort(out.connection_order.begin(), out.connection_order.end(), [&](int a, int b) {
    return setup.connections[static_cast<size_t>(a)].rank <
           setup.connections[static_cast<size_t>(b)].rank;
  });
  std::vector<Vec6> basis;  // orthonormalized consumed rows
  out.new_dofs_per_connection.assign(out.connection_order.size(), 0);
  for (size_t oi = 0; oi < out.connection_order.size(); ++oi) {
    const auto& conn = setup.connections[static_cast<size_t>(out.connection_order[oi])];
    const Surface& s = part.surface(conn.part_surface);
    for (Kind k : constrained_kinds(s.cls, conn.long_fit)) {
      DofEntry e;
      e.connection_index = out.connection_order[oi];
      e.kind = k;
      e.row = screw_row(k, s.frame);
      Vec6 res = e.row;
      const double full = std::sqrt(dot6(res, res));
      for (const Vec6& b : basis) {
        const double p = dot6(res, b);
        for (int i = 0; i < 6; ++i) res[i] -= p * b[i];
      }
      const double rem = std::sqrt(dot6(res, res));
      e.independent = full > 0 && rem > kRowIndependenceTol * full;
      if (e.independent) {
        for (int i = 0; i < 6; ++i) res[i] /= rem;
        basis.push_back(res);
        ++out.rank;
        ++out.new_dofs_per_connection[oi];
      }
      out.entries.push_back(e);
    }
  }
  return out;
}

// ---- plan validation ---------------------------------------------------------

namespace detail {
inline std::optional<int> produced_in(const ProcessPlan& plan, int surface) {
  for (const auto& r : plan.raw)
    if (r.surface == surface) return 0;
  for (const auto& su : plan.setups)
    for (const auto& op : su.machining)
      if (op.surface == surface) return su.id;
  return std::nullopt;
}
}  // namespace detail

inline std::vector<ValidationIssue> validate_plan(const ProcessPlan& plan) {
  std::vector<ValidationIssue> issues = validate_part(plan.part);
  auto add = [&issues](const std::string& code, const std::string& msg, int sid, int setup) {
    issues.push_back({code, msg, sid, setup});
  };

  std::map<int, int> produced;  // surface -> producing setup (0 = raw)
  for (const auto& r : plan.raw) {
    if (!plan.part.has_surface(r.surface))
      add("raw.unknown_surface", "raw declaration references unknown surface " +
          std::to_string(r.surface), r.surface, 0);
    else if (produced.count(r.surface))
      add("raw.duplicate", "surface " + std::to_string(r.surface) + " declared raw twice",
          r.surface, 0);
    else
      produced[r.surface] = 0;
  }

  int prev_id = 0;
  for (const auto& su : plan.setups) {
    const int j = su.id;
    if (j <= prev_id)
      add("setup.order", "set-up ids must be strictly increasing and positive", -1, j);
    prev_id = j;

    // precedence: positioning surfaces must exist before this set-up runs
    std::map<int, int> per_surface_conn;
    std::vector<int> ranks;
    for (const auto& c : su.connections) {
      if (!plan.part.has_surface(c.part_surface)) {
        add("connection.unknown_surface", "set-up " + std::to_string(j) +
            ": connection references unknown surface " + std::to_string(c.part_surface),
            c.part_surface, j);
        continue;
      }
      if (per_surface_conn.count(c.part_surface))
        add("connection.duplicate_surface", "set-up " + std::to_string(j) +
            ": surface " + std::to_string(c.part_surface) + " used by two connections",
            c.part_surface, j);
      per_surface_conn[c.part_surface] = c.rank;
      ranks.push_back(c.rank);
      auto prod = produced.find(c.part_surface);
      if (prod == produced.end())
        add("connection.precedence", "set-up " + std::to_string(j) + ": positioning surface " +
            std::to_string(c.part_surface) + " is not raw or machined earlier",
            c.part_surface, j);
      const Surface& s = plan.part.surface(c.part_surface);
      if (c.contact == ContactType::floating && s.cls == SurfaceClass::cylinder &&
          !(c.clearance > 0))
        add("connection.clearance", "set-up " + std::to_string(j) + ": floating cylinder contact "
            "on surface " + std::to_string(c.part_surface) + " needs clearance > 0",
            c.part_surface, j);
    }
    std::sort(ranks.begin(), ranks.end());
    for (size_t i = 0; i < ranks.size(); ++i)
      if (ranks[i] != static_cast<int>(i) + 1) {
        add("connection.ranks", "set-up " + std::to_string(j) +
            ": ranks must be contiguous from 1", -1, j);
        break;
      }

    for (const auto& op : su.machining) {
      if (!plan.part.has_surface(op.surface)) {
        add("machining.unknown_surface", "set-up " + std::to_string(j) +
            ": machining references unknown surface " + std::to_string(op.surface),
            op.surface, j);
        continue;
      }
      if (produced.count(op.surface))
        add("machining.duplicate", "surface " + std::to_string(op.surface) +
            " produced more than once (set-up " + std::to_string(j) + ")", op.surface, j);
      else
        produced[op.surface] = j;
      if (per_surface_conn.count(op.surface))
        add("machining.positioning_overlap", "set-up " + std::to_string(j) + ": surface " +
            std::to_string(op.surface) + " both positions and is machined", op.surface, j);
    }

    // degree-of-freedom coverage — only meaningful if references resolve
    bool refs_ok = true;
    for (const auto& c : su.connections)
      if (!plan.part.has_surface(c.part_surface)) refs_ok = false;
    if (refs_ok && !su.connections.empty()) {
      const SetupDofAnalysis dof = analyze_setup_rows(plan.part, su);
      if (dof.rank < 6)
        add("positioning.underconstrained", "set-up " + std::to_string(j) +
            ": connections constrain only " + std::to_string(dof.rank) +
            " of 6 degrees of freedom", -1, j);
      for (size_t oi = 0; oi < dof.connection_order.size(); ++oi)
        if (dof.new_dofs_per_connection[oi] == 0) {
          const auto& c = su.connections[static_cast<size_t>(dof.connection_order[oi])];
          add("positioning.overconstrained", "set-up " + std::to_string(j) + ": rank " +
              std::to_string(c.rank) + " connection (surface " +
              std::to_string(c.part_surface) + ") constrains no new degree of freedom",
              c.part_surface, j);
        }
    } else if (su.connections.empty() && !su.machining.empty()) {
      add("positioning.missing", "set-up " + std::to_string(j) + " machines without positioning",
          -1, j);
    }

    for (const auto& c : su.connections) {
      if (!plan.part.has_surface(c.part_surface)) continue;
      const Surface& s = plan.part.surface(c.part_surface);
      for (const auto& [k, iv] : c.holder_bounds) {
        const auto& free = class_template(s.cls).free_kinds;
        if (std::find(free.begin(), free.end(), k) == free.end())
          add("connection.bad_bound_kind", "set-up " + std::to_string(j) + ": holder bound on " +
              kind_name(k) + " is not a free kind of a " +
              surface_class_name(s.cls), c.part_surface, j);
        if (!iv.valid())
          add("connection.bad_bounds", "set-up " + std::to_string(j) +
              ": holder bounds lower > upper", c.part_surface, j);
      }
    }
  }
  return issues;
}

// ---- canonical registry ------------------------------------------------------

// Register every machining (incl. raw), holder, and floating-link parameter of a
// valid plan, in a fixed canonical order: raw surfaces first, then per set-up the
// connections in rank order (holder kinds, then independent floating link kinds)
// and finally the machining operations. Declared boxes land on the parameters.
inline ParameterRegistry registry_of(const ProcessPlan& plan) {
  ParameterRegistry reg;
  auto set_declared_bounds = [&reg](int surface, int setup, ParamCategory cat,
                                    const std::map<Kind, Interval>& bounds) {
    for (const auto& [k, iv] : bounds) {
      const std::string n = cat == ParamCategory::dm ? dm_name(k, surface)
                                                     : dh_name(k, surface, setup);
      reg.set_bounds(reg.require(n), iv);
    }
  };

  for (const auto& r : plan.raw) {
    const Surface& s = plan.part.surface(r.surface);
    for (Kind k : class_template(s.cls).free_kinds)
      reg.add({-1, dm_name(k, r.surface), k, r.surface, 0, ParamCategory::dm, std::nullopt});
    set_declared_bounds(r.surface, 0, ParamCategory::dm, r.bounds);
  }

  for (const auto& su : plan.setups) {
    const SetupDofAnalysis dof = analyze_setup_rows(plan.part, su);
    for (size_t oi = 0; oi < dof.connection_order.size(); ++oi) {
      const auto& conn = su.connections[static_cast<size_t>(dof.connection_order[oi])];
      const Surface& s = plan.part.surface(conn.part_surface);
      for (Kind k : class_template(s.cls).free_kinds)
        reg.add({-1, dh_name(k, conn.part_surface, su.id), k, conn.part_surface, su.id,
                 ParamCategory::dh, std::nullopt});
      set_declared_bounds(conn.part_surface, su.id, ParamCategory::dh, conn.holder_bounds);
      if (conn.contact == ContactType::floating)
        for (const DofEntry& e : dof.entries)
          if (e.connection_index == dof.connection_order[oi] && e.independent)
            reg.add({-1, lhp_name(e.kind, conn.part_surface, su.id), e.kind, conn.part_surface,
                     su.id, ParamCategory::lhp, std::nullopt});
    }
    for (const auto& op : su.machining) {
      const Surface& s = plan.part.surface(op.surface);
      for (Kind k : class_template(s.cls).free_kinds)
        reg.add({-1, dm_name(k, op.surface), k, op.surface, su.id, ParamCategory::dm,
                 std::nullopt});
      set_declared_bounds(op.surface, su.id, ParamCategory::dm, op.bounds);
    }
  }
  return reg;
}

// Resolve an authored joint constraint against the registry.
inline LinearConstraint resolve_constraint(const NamedConstraint& nc,
                                           const ParameterRegistry& reg) {
  LinearConstraint out;
  for (const auto& [name, coef] : nc.coefficients)
    out.expr.add_term(reg.require(name), coef);
  out.sense = nc.sense;
  out.bound = nc.bound;
  out.tag = nc.tag;
  out.label = nc.label;
  return out;
}

}  // namespace sdtol
