#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sdtol/gauge.hpp"
#include "sdtol/problems.hpp"

namespace sdtol {

using Json = nlohmann::json;

// A complete problem statement as exchanged on disk: the plan, the functional
// requirement it must meet, and (optionally) the manufacturing specifications
// to verify, size, or audit.
struct PlanDocument {
  ProcessPlan plan;
  VirtualGauge functional;
  std::vector<ManufacturingSpec> specs;
};

// Problems found while reading a document. `parse` is a syntax failure (with
// line/column), `schema` a shape or value violation, `reference` a dangling id,
// and `plan` a process-level inconsistency (precedence, ranks, geometry).
enum class IssueKind { parse, schema, reference, plan };

inline const char* issue_kind_name(IssueKind k) {
  switch (k) {
    case IssueKind::parse: return "parse";
    case IssueKind::schema: return "schema";
    case IssueKind::reference: return "reference";
    case IssueKind::plan: return "plan";
  }
  return "?";
}

struct DocumentIssue {
  IssueKind kind = IssueKind::schema;
  std::string where;  // JSON path, or source:line:column for parse errors
  std::string message;
};

namespace detail {
inline std::string issues_summary(const std::vector<DocumentIssue>& issues) {
  if (issues.empty()) return "invalid document";
  std::string s = issues.front().where + ": " + issues.front().message;
  if (issues.size() > 1) s += " (+" + std::to_string(issues.size() - 1) + " more)";
  return s;
}
}  // namespace detail

struct DocumentError : Error {
  std::vector<DocumentIssue> issues;
  explicit DocumentError(std::vector<DocumentIssue> iss)
      : Error(detail::issues_summary(iss)), issues(std::move(iss)) {}
};

namespace detail {

class DocReader {
 public:
  explicit DocReader(const Json& root) : root_(root) {}

  PlanDocument read() {
    PlanDocument doc;
    if (!root_.is_object()) {
      fail(IssueKind::schema, "$", "document root must be an object");
      throw DocumentError(std::move(issues_));
    }
    read_units();
    read_sampling(doc.plan.sampling);
    read_part(doc.plan.part);
    read_process(doc.plan);
    read_functional(doc.functional);
    read_specs(doc.specs);
    if (!has(IssueKind::schema)) cross_reference(doc);
    if (issues_.empty())
      for (const ValidationIssue& v : validate_plan(doc.plan))
        fail(IssueKind::plan, locate_plan_issue(v), v.message);
    if (!issues_.empty()) throw DocumentError(std::move(issues_));
    return doc;
  }

 private:
  const Json& root_;
  std::vector<DocumentIssue> issues_;

  void fail(IssueKind k, const std::string& where, const std::string& msg) {
    issues_.push_back({k, where, msg});
  }
  bool has(IssueKind k) const {
    return std::any_of(issues_.begin(), issues_.end(),
                       [k](const DocumentIssue& i) { return i.kind == k; });
  }

  const Json* want(const Json& obj, const char* key, const std::string& path,
                   bool required = true) {
    auto it = obj.find(key);
    if (it != obj.end()) return &*it;
    if (required) fail(IssueKind::schema, path, std::string("missing required key '") + key + "'");
    return nullptr;
  }

  bool as_number(const Json& j, const std::string& path, double& out) {
    if (j.is_number()) {
      out = j.get<double>();
      return true;
    }
    fail(IssueKind::schema, path, "expected a number");
    return false;
  }
  bool as_int(const Json& j, const std::string& path, int& out) {
    if (j.is_number_integer()) {
      out = j.get<int>();
      return true;
    }
    fail(IssueKind::schema, path, "expected an integer");
    return false;
  }
  bool as_string(const Json& j, const std::string& path, std::string& out) {
    if (j.is_string()) {
      out = j.get<std::string>();
      return true;
    }
    fail(IssueKind::schema, path, "expected a string");
    return false;
  }
  bool as_bool(const Json& j, const std::string& path, bool& out) {
    if (j.is_boolean()) {
      out = j.get<bool>();
      return true;
    }
    fail(IssueKind::schema, path, "expected a boolean");
    return false;
  }

  bool read_vec3(const Json& j, const std::string& path, Vec3& out) {
    if (!j.is_array() || j.size() != 3) {
      fail(IssueKind::schema, path, "expected an array of 3 numbers");
      return false;
    }
    double c[3];
    for (int i = 0; i < 3; ++i)
      if (!as_number(j[i], path + "[" + std::to_string(i) + "]", c[i])) return false;
    out = {c[0], c[1], c[2]};
    return true;
  }

  bool read_interval(const Json& j, const std::string& path, Interval& out) {
    if (!j.is_array() || j.size() != 2) {
      fail(IssueKind::schema, path, "expected [lower, upper]");
      return false;
    }
    if (!as_number(j[0], path + "[0]", out.lower) || !as_number(j[1], path + "[1]", out.upper))
      return false;
    if (!(out.lower <= out.upper)) {
      fail(IssueKind::schema, path, "lower bound exceeds upper bound");
      return false;
    }
    return true;
  }

  std::map<Kind, Interval> read_bounds(const Json& j, const std::string& path) {
    std::map<Kind, Interval> out;
    if (!j.is_object()) {
      fail(IssueKind::schema, path, "expected an object of kind -> [lower, upper]");
      return out;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto kind = kind_from_name(it.key());
      if (!kind) {
        fail(IssueKind::schema, path + "." + it.key(), "unknown deviation kind");
        continue;
      }
      Interval iv;
      if (read_interval(*it, path + "." + it.key(), iv)) out[*kind] = iv;
    }
    return out;
  }

  bool read_zone(const Json& j, const std::string& path, ZoneSpec& out) {
    if (!j.is_object()) {
      fail(IssueKind::schema, path, "expected an object");
      return false;
    }
    std::string type;
    const Json* t = want(j, "type", path);
    const Json* w = want(j, "width", path);
    if (!t || !w || !as_string(*t, path + ".type", type)) return false;
    if (type == "location")
      out.type = ZoneSpec::Type::location;
    else if (type == "orientation")
      out.type = ZoneSpec::Type::orientation;
    else {
      fail(IssueKind::schema, path + ".type", "expected 'location' or 'orientation'");
      return false;
    }
    if (!as_number(*w, path + ".width", out.width)) return false;
    if (!(out.width > 0)) {
      fail(IssueKind::schema, path + ".width", "zone width must be > 0");
      return false;
    }
    return true;
  }

  // Axes are re-orthonormalized after a loose acceptance check so that
  // hand-authored decimals survive the library's exact-orthonormality gates.
  bool read_frame(const Json& j, const std::string& path, Frame& out) {
    const Json* o = want(j, "origin", path);
    const Json* ax = want(j, "axis_x", path);
    const Json* az = want(j, "axis_z", path);
    if (!o || !ax || !az) return false;
    Vec3 origin, x, z;
    if (!read_vec3(*o, path + ".origin", origin) || !read_vec3(*ax, path + ".axis_x", x) ||
        !read_vec3(*az, path + ".axis_z", z))
      return false;
    const double nx = norm(x), nz = norm(z);
    if (std::abs(nx - 1) > 1e-6 || std::abs(nz - 1) > 1e-6 || std::abs(dot(x, z)) > 1e-6) {
      fail(IssueKind::schema, path, "axis_x and axis_z must be orthogonal unit vectors");
      return false;
    }
    Mat3 basis{x, cross(z, x), z};
    if (!is_orthonormal(basis) || !is_right_handed(basis)) {
      z = z * (1.0 / nz);
      x = x - z * dot(x, z);
      x = x * (1.0 / norm(x));
      basis = {x, cross(z, x), z};
    }
    out.origin = origin;
    out.basis = basis;
    return true;
  }

  void read_units() {
    const Json* u = want(root_, "units", "$");
    if (!u) return;
    if (!u->is_object()) {
      fail(IssueKind::schema, "units", "expected an object");
      return;
    }
    std::string len, ang;
    const Json* l = want(*u, "length", "units");
    const Json* a = want(*u, "angle", "units");
    if (l && as_string(*l, "units.length", len) && len != "mm")
      fail(IssueKind::schema, "units.length", "only 'mm' is supported");
    if (a && as_string(*a, "units.angle", ang) && ang != "rad")
      fail(IssueKind::schema, "units.angle", "only 'rad' is supported");
  }

  void read_sampling(SampleConfig& out) {
    auto it = root_.find("sampling");
    if (it == root_.end()) return;
    if (!it->is_object()) {
      fail(IssueKind::schema, "sampling", "expected an object");
      return;
    }
    auto c = it->find("cylinder_circle_count");
    if (c == it->end()) return;
    int n = 0;
    if (!as_int(*c, "sampling.cylinder_circle_count", n)) return;
    if (n < 3) {
      fail(IssueKind::schema, "sampling.cylinder_circle_count", "need at least 3 points");
      return;
    }
    out.cylinder_circle_count = n;
  }

  void read_part(NominalPart& part) {
    part.global = {{0, 0, 0}, Mat3::identity()};  // identity placement by convention
    const Json* p = want(root_, "nominal_part", "$");
    if (!p) return;
    const Json* surfaces = p->is_object() ? want(*p, "surfaces", "nominal_part") : nullptr;
    if (!p->is_object()) fail(IssueKind::schema, "nominal_part", "expected an object");
    if (!surfaces) return;
    if (!surfaces->is_array() || surfaces->empty()) {
      fail(IssueKind::schema, "nominal_part.surfaces", "expected a non-empty array");
      return;
    }
    for (size_t i = 0; i < surfaces->size(); ++i) {
      const std::string path = "nominal_part.surfaces[" + std::to_string(i) + "]";
      const Json& js = (*surfaces)[i];
      if (!js.is_object()) {
        fail(IssueKind::schema, path, "expected an object");
        continue;
      }
      Surface s;
      const Json* id = want(js, "id", path);
      const Json* type = want(js, "type", path);
      std::string tname;
      if (!id || !as_int(*id, path + ".id", s.id)) continue;
      if (!type || !as_string(*type, path + ".type", tname)) continue;
      if (s.id < 1) {
        fail(IssueKind::schema, path + ".id", "surface ids must be >= 1");
        continue;
      }
      if (part.surfaces.count(s.id)) {
        fail(IssueKind::schema, path + ".id",
             "duplicate surface id " + std::to_string(s.id));
        continue;
      }
      if (tname == "plane")
        s.cls = SurfaceClass::plane;
      else if (tname == "cylinder")
        s.cls = SurfaceClass::cylinder;
      else {
        fail(IssueKind::schema, path + ".type", "expected 'plane' or 'cylinder'");
        continue;
      }
      if (!read_frame(js, path, s.frame)) continue;
      if (s.cls == SurfaceClass::plane) {
        const Json* b = want(js, "boundary", path);
        if (!b) continue;
        if (!b->is_array() || b->size() < 3) {
          fail(IssueKind::schema, path + ".boundary", "expected >= 3 [x, y] vertices");
          continue;
        }
        bool ok = true;
        for (size_t k = 0; k < b->size(); ++k) {
          const std::string vp = path + ".boundary[" + std::to_string(k) + "]";
          const Json& v = (*b)[k];
          double x = 0, y = 0;
          if (!v.is_array() || v.size() != 2 || !as_number(v[0], vp, x) ||
              !as_number(v[1], vp, y)) {
            if (v.is_array() && v.size() != 2)
              fail(IssueKind::schema, vp, "expected [x, y]");
            ok = false;
            break;
          }
          s.boundary_local.push_back({x, y, 0});
        }
        if (!ok) continue;
      } else {
        const Json* r = want(js, "radius", path);
        const Json* e = want(js, "extent", path);
        Interval ext;
        if (!r || !e || !as_number(*r, path + ".radius", s.radius) ||
            !read_interval(*e, path + ".extent", ext))
          continue;
        if (!(s.radius > 0)) {
          fail(IssueKind::schema, path + ".radius", "cylinder radius must be > 0");
          continue;
        }
        if (!(ext.lower < ext.upper)) {
          fail(IssueKind::schema, path + ".extent", "extent must satisfy z0 < z1");
          continue;
        }
        // Wall vertices at both ends pin the radius and the axial extent.
        for (const double z : {ext.lower, ext.upper}) {
          s.boundary_local.push_back({s.radius, 0, z});
          s.boundary_local.push_back({0, s.radius, z});
          s.boundary_local.push_back({-s.radius, 0, z});
        }
      }
      part.surfaces[s.id] = std::move(s);
    }
  }

  void read_connection(const Json& j, const std::string& path, ElementaryConnection& c) {
    if (!j.is_object()) {
      fail(IssueKind::schema, path, "expected an object");
      return;
    }
    const Json* s = want(j, "surface", path);
    const Json* r = want(j, "rank", path);
    if (s) as_int(*s, path + ".surface", c.part_surface);
    if (r) as_int(*r, path + ".rank", c.rank);
    if (auto it = j.find("contact"); it != j.end()) {
      std::string contact;
      if (as_string(*it, path + ".contact", contact)) {
        if (contact == "slipping")
          c.contact = ContactType::slipping;
        else if (contact == "floating")
          c.contact = ContactType::floating;
        else
          fail(IssueKind::schema, path + ".contact", "expected 'slipping' or 'floating'");
      }
    }
    if (auto it = j.find("clearance"); it != j.end())
      as_number(*it, path + ".clearance", c.clearance);
    if (auto it = j.find("part_is_bore"); it != j.end())
      as_bool(*it, path + ".part_is_bore", c.part_is_bore);
    if (auto it = j.find("long_fit"); it != j.end()) as_bool(*it, path + ".long_fit", c.long_fit);
    if (auto it = j.find("holder_bounds"); it != j.end())
      c.holder_bounds = read_bounds(*it, path + ".holder_bounds");
  }

  void read_constraint(const Json& j, const std::string& path, NamedConstraint& c) {
    if (!j.is_object()) {
      fail(IssueKind::schema, path, "expected an object");
      return;
    }
    const Json* co = want(j, "coefficients", path);
    const Json* se = want(j, "sense", path);
    const Json* bo = want(j, "bound", path);
    if (co) {
      if (!co->is_object() || co->empty())
        fail(IssueKind::schema, path + ".coefficients",
             "expected a non-empty object of parameter -> coefficient");
      else
        for (auto it = co->begin(); it != co->end(); ++it) {
          double v = 0;
          if (as_number(*it, path + ".coefficients." + it.key(), v))
            c.coefficients[it.key()] = v;
        }
    }
    if (se) {
      std::string sense;
      if (as_string(*se, path + ".sense", sense)) {
        if (sense == "le")
          c.sense = Sense::le;
        else if (sense == "ge")
          c.sense = Sense::ge;
        else
          fail(IssueKind::schema, path + ".sense", "expected 'le' or 'ge'");
      }
    }
    if (bo) as_number(*bo, path + ".bound", c.bound);
    if (auto it = j.find("tag"); it != j.end()) {
      std::string tag;
      if (as_string(*it, path + ".tag", tag)) {
        if (tag == "CM")
          c.tag = ConstraintTag::cm;
        else if (tag == "CH")
          c.tag = ConstraintTag::ch;
        else if (tag == "CHP")
          c.tag = ConstraintTag::chp;
        else
          fail(IssueKind::schema, path + ".tag", "expected 'CM', 'CH' or 'CHP'");
      }
    }
    if (auto it = j.find("label"); it != j.end()) as_string(*it, path + ".label", c.label);
  }

  void read_process(ProcessPlan& plan) {
    const Json* p = want(root_, "process", "$");
    if (!p) return;
    if (!p->is_object()) {
      fail(IssueKind::schema, "process", "expected an object");
      return;
    }
    if (auto it = p->find("raw"); it != p->end()) {
      if (!it->is_array()) {
        fail(IssueKind::schema, "process.raw", "expected an array");
      } else
        for (size_t i = 0; i < it->size(); ++i) {
          const std::string path = "process.raw[" + std::to_string(i) + "]";
          const Json& jr = (*it)[i];
          if (!jr.is_object()) {
            fail(IssueKind::schema, path, "expected an object");
            continue;
          }
          RawSurfaceDecl r;
          const Json* s = want(jr, "surface", path);
          const Json* b = want(jr, "bounds", path);
          if (s) as_int(*s, path + ".surface", r.surface);
          if (b) r.bounds = read_bounds(*b, path + ".bounds");
          plan.raw.push_back(std::move(r));
        }
    }
    const Json* setups = want(*p, "setups", "process");
    if (!setups) return;
    if (!setups->is_array() || setups->empty()) {
      fail(IssueKind::schema, "process.setups", "expected a non-empty array");
      return;
    }
    for (size_t i = 0; i < setups->size(); ++i) {
      const std::string path = "process.setups[" + std::to_string(i) + "]";
      const Json& js = (*setups)[i];
      if (!js.is_object()) {
        fail(IssueKind::schema, path, "expected an object");
        continue;
      }
      SetUp su;
      const Json* id = want(js, "id", path);
      if (id) as_int(*id, path + ".id", su.id);
      if (auto it = js.find("connections"); it != js.end() && it->is_array())
        for (size_t k = 0; k < it->size(); ++k) {
          ElementaryConnection c;
          read_connection((*it)[k], path + ".connections[" + std::to_string(k) + "]", c);
          su.connections.push_back(std::move(c));
        }
      else
        fail(IssueKind::schema, path + ".connections", "expected an array");
      if (auto it = js.find("machining"); it != js.end() && it->is_array())
        for (size_t k = 0; k < it->size(); ++k) {
          const std::string mp = path + ".machining[" + std::to_string(k) + "]";
          const Json& jm = (*it)[k];
          if (!jm.is_object()) {
            fail(IssueKind::schema, mp, "expected an object");
            continue;
          }
          MachiningOperation op;
          const Json* s = want(jm, "surface", mp);
          const Json* b = want(jm, "bounds", mp);
          if (s) as_int(*s, mp + ".surface", op.surface);
          if (b) op.bounds = read_bounds(*b, mp + ".bounds");
          su.machining.push_back(std::move(op));
        }
      else
        fail(IssueKind::schema, path + ".machining", "expected an array");
      if (auto it = js.find("constraints"); it != js.end()) {
        if (!it->is_array())
          fail(IssueKind::schema, path + ".constraints", "expected an array");
        else
          for (size_t k = 0; k < it->size(); ++k) {
            NamedConstraint c;
            read_constraint((*it)[k], path + ".constraints[" + std::to_string(k) + "]", c);
            su.constraints.push_back(std::move(c));
          }
      }
      plan.setups.push_back(std::move(su));
    }
  }

  bool read_datums(const Json& j, const std::string& path, std::vector<int>& out,
                   bool allow_empty) {
    if (!j.is_array() || (!allow_empty && j.empty())) {
      fail(IssueKind::schema, path, "expected a non-empty array of surface ids");
      return false;
    }
    for (size_t i = 0; i < j.size(); ++i) {
      int id = 0;
      if (!as_int(j[i], path + "[" + std::to_string(i) + "]", id)) return false;
      out.push_back(id);
    }
    return true;
  }

  void read_functional(VirtualGauge& g) {
    const Json* f = want(root_, "functional_gauge", "$");
    if (!f) return;
    if (!f->is_object()) {
      fail(IssueKind::schema, "functional_gauge", "expected an object");
      return;
    }
    const std::string path = "functional_gauge";
    const Json* d = want(*f, "datums", path);
    const Json* t = want(*f, "toleranced", path);
    const Json* z = want(*f, "zone", path);
    if (d) read_datums(*d, path + ".datums", g.datums, false);
    if (t) as_int(*t, path + ".toleranced", g.toleranced);
    if (z) read_zone(*z, path + ".zone", g.zone);
    g.tag = "FR";
    if (auto it = f->find("tag"); it != f->end()) as_string(*it, path + ".tag", g.tag);
    g.manufacturing = false;
  }

  void read_specs(std::vector<ManufacturingSpec>& specs) {
    auto it = root_.find("manufacturing_specs");
    if (it == root_.end()) return;
    if (!it->is_array()) {
      fail(IssueKind::schema, "manufacturing_specs", "expected an array");
      return;
    }
    for (size_t i = 0; i < it->size(); ++i) {
      const std::string path = "manufacturing_specs[" + std::to_string(i) + "]";
      const Json& js = (*it)[i];
      if (!js.is_object()) {
        fail(IssueKind::schema, path, "expected an object");
        continue;
      }
      ManufacturingSpec s;
      const Json* su = want(js, "setup", path);
      const Json* n = want(js, "surface", path);
      const Json* d = want(js, "datums", path);
      const Json* z = want(js, "zone", path);
      if (su) as_int(*su, path + ".setup", s.setup);
      if (n) as_int(*n, path + ".surface", s.surface);
      if (d) read_datums(*d, path + ".datums", s.datums, true);
      if (z) read_zone(*z, path + ".zone", s.zone);
      specs.push_back(std::move(s));
    }
  }

  void cross_reference(const PlanDocument& doc) {
    const NominalPart& part = doc.plan.part;
    auto check = [&](int id, const std::string& path) {
      if (!part.has_surface(id))
        fail(IssueKind::reference, path, "unknown surface " + std::to_string(id));
    };
    for (size_t i = 0; i < doc.plan.raw.size(); ++i)
      check(doc.plan.raw[i].surface, "process.raw[" + std::to_string(i) + "].surface");
    std::set<int> setup_ids;
    for (size_t i = 0; i < doc.plan.setups.size(); ++i) {
      const SetUp& su = doc.plan.setups[i];
      const std::string path = "process.setups[" + std::to_string(i) + "]";
      setup_ids.insert(su.id);
      for (size_t k = 0; k < su.connections.size(); ++k)
        check(su.connections[k].part_surface,
              path + ".connections[" + std::to_string(k) + "].surface");
      for (size_t k = 0; k < su.machining.size(); ++k)
        check(su.machining[k].surface, path + ".machining[" + std::to_string(k) + "].surface");
    }
    for (size_t i = 0; i < doc.functional.datums.size(); ++i)
      check(doc.functional.datums[i],
            "functional_gauge.datums[" + std::to_string(i) + "]");
    check(doc.functional.toleranced, "functional_gauge.toleranced");
    for (size_t i = 0; i < doc.specs.size(); ++i) {
      const std::string path = "manufacturing_specs[" + std::to_string(i) + "]";
      check(doc.specs[i].surface, path + ".surface");
      for (size_t k = 0; k < doc.specs[i].datums.size(); ++k)
        check(doc.specs[i].datums[k], path + ".datums[" + std::to_string(k) + "]");
      if (!setup_ids.count(doc.specs[i].setup))
        fail(IssueKind::reference, path + ".setup",
             "unknown set-up " + std::to_string(doc.specs[i].setup));
    }
  }

  static std::string locate_plan_issue(const ValidationIssue& v) {
    std::string where = "plan";
    if (v.setup >= 0) where += ".setup " + std::to_string(v.setup);
    if (v.surface >= 0) where += ".surface " + std::to_string(v.surface);
    return where;
  }
};

// 1-based line/column of a byte offset, for locating syntax errors.
inline std::pair<int, int> line_column(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else
      ++col;
  }
  return {line, col};
}

}  // namespace detail

inline PlanDocument parse_plan_document(const Json& root) {
  return detail::DocReader(root).read();
}

inline PlanDocument parse_plan_text(const std::string& text,
                                    const std::string& source = "<input>") {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte ? e.byte - 1 : 0);
    std::vector<DocumentIssue> issues{
        {IssueKind::parse, source + ":" + std::to_string(line) + ":" + std::to_string(col),
         e.what()}};
    throw DocumentError(std::move(issues));
  }
  return parse_plan_document(root);
}

inline PlanDocument load_plan_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::vector<DocumentIssue> issues{{IssueKind::parse, path, "cannot open file"}};
    throw DocumentError(std::move(issues));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_plan_text(buf.str(), path);
}

// ---- writing -----------------------------------------------------------------

namespace detail {

inline Json vec3_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

inline Json bounds_json(const std::map<Kind, Interval>& bounds) {
  Json j = Json::object();
  for (const auto& [k, iv] : bounds) j[kind_name(k)] = Json::array({iv.lower, iv.upper});
  return j;
}

inline Json zone_json(const ZoneSpec& z) {
  return Json{{"type", zone_type_name(z.type)}, {"width", z.width}};
}

inline Json surface_json(const Surface& s) {
  Json j{{"id", s.id},
         {"type", surface_class_name(s.cls)},
         {"origin", vec3_json(s.frame.origin)},
         {"axis_x", vec3_json(s.frame.axis_x())},
         {"axis_z", vec3_json(s.frame.axis_z())}};
  if (s.cls == SurfaceClass::plane) {
    Json b = Json::array();
    for (const Vec3& v : s.boundary_local) b.push_back(Json::array({v.x, v.y}));
    j["boundary"] = std::move(b);
  } else {
    double z0 = s.boundary_local.front().z, z1 = z0;
    for (const Vec3& v : s.boundary_local) {
      z0 = std::min(z0, v.z);
      z1 = std::max(z1, v.z);
    }
    j["radius"] = s.radius;
    j["extent"] = Json::array({z0, z1});
  }
  return j;
}

}  // namespace detail

inline Json to_json(const PlanDocument& doc) {
  Json root;
  root["units"] = {{"length", "mm"}, {"angle", "rad"}};
  root["sampling"] = {{"cylinder_circle_count", doc.plan.sampling.cylinder_circle_count}};
  Json surfaces = Json::array();
  for (const auto& [id, s] : doc.plan.part.surfaces) surfaces.push_back(detail::surface_json(s));
  root["nominal_part"] = {{"surfaces", std::move(surfaces)}};

  Json process = Json::object();
  if (!doc.plan.raw.empty()) {
    Json raw = Json::array();
    for (const RawSurfaceDecl& r : doc.plan.raw)
      raw.push_back({{"surface", r.surface}, {"bounds", detail::bounds_json(r.bounds)}});
    process["raw"] = std::move(raw);
  }
  Json setups = Json::array();
  for (const SetUp& su : doc.plan.setups) {
    Json js{{"id", su.id}};
    Json conns = Json::array();
    for (const ElementaryConnection& c : su.connections) {
      Json jc{{"surface", c.part_surface},
              {"rank", c.rank},
              {"contact", c.contact == ContactType::slipping ? "slipping" : "floating"}};
      if (c.contact == ContactType::floating) {
        jc["clearance"] = c.clearance;
        jc["part_is_bore"] = c.part_is_bore;
        jc["long_fit"] = c.long_fit;
      }
      if (!c.holder_bounds.empty()) jc["holder_bounds"] = detail::bounds_json(c.holder_bounds);
      conns.push_back(std::move(jc));
    }
    js["connections"] = std::move(conns);
    Json machining = Json::array();
    for (const MachiningOperation& op : su.machining)
      machining.push_back({{"surface", op.surface}, {"bounds", detail::bounds_json(op.bounds)}});
    js["machining"] = std::move(machining);
    if (!su.constraints.empty()) {
      Json cons = Json::array();
      for (const NamedConstraint& c : su.constraints) {
        Json jc{{"coefficients", Json(c.coefficients)},
                {"sense", c.sense == Sense::le ? "le" : "ge"},
                {"bound", c.bound},
                {"tag", constraint_tag_name(c.tag)}};
        if (!c.label.empty()) jc["label"] = c.label;
        cons.push_back(std::move(jc));
      }
      js["constraints"] = std::move(cons);
    }
    setups.push_back(std::move(js));
  }
  process["setups"] = std::move(setups);
  root["process"] = std::move(process);

  root["functional_gauge"] = {{"datums", doc.functional.datums},
                                    {"toleranced", doc.functional.toleranced},
                                    {"zone", detail::zone_json(doc.functional.zone)},
                                    {"tag", doc.functional.tag}};
  if (!doc.specs.empty()) {
    Json specs = Json::array();
    for (const ManufacturingSpec& s : doc.specs)
      specs.push_back({{"setup", s.setup},
                       {"surface", s.surface},
                       {"datums", s.datums},
                       {"zone", detail::zone_json(s.zone)}});
    root["manufacturing_specs"] = std::move(specs);
  }
  return root;
}

}  // namespace sdtol
