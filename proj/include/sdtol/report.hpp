#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sdtol/synthesis.hpp"

namespace sdtol {

// Everything needed to reproduce a run.
struct RunInfo {
  std::string command;
  std::string plan_source;
  std::string solver;  // "enumerate" | "iterative"
  int starts = 16;
  unsigned seed = 1;
};

// A worst-case solve with parameter values resolved to names. `complete` is
// set for verification solves only.
struct SolveReport {
  std::string status;
  double value = 0;
  bool conform = false;
  std::optional<bool> complete;
  std::vector<std::string> active_gaps;
  std::vector<std::string> warnings;
  std::map<std::string, double> worst_deviations;  // outer point
  std::map<std::string, double> worst_shifts;      // inner point (mobilities, floats)
  std::map<std::string, double> divergence_ray;
};

struct RedundancyReport {
  int setup = 0;
  int surface = -1;
  bool unnecessary = false;
  double value_without = 0;
  bool divergent_without = false;
};

struct Report {
  RunInfo run;
  std::map<std::string, double> tolerances;  // numeric gates the run used
  std::optional<SolveReport> analysis;
  std::optional<InfluenceTable> influence;
  std::optional<std::vector<SpecProposal>> proposals;
  std::optional<SolveReport> verification;
  std::optional<SizingResult> sizing;
  std::optional<std::vector<RedundancyReport>> redundancy;
};

inline std::map<std::string, double> reported_tolerances() {
  return {{"divergence", kDivergenceTol},
          {"influence_blank", kInfluenceBlankTol},
          {"influence_step", kInfluenceStep},
          {"redundancy_value_drift", kRedundancyTol},
          {"sizing_residual", kSizingValueTol},
          {"sizing_scale", kSizingScaleTol},
          {"worst_case_tie", kWorstTieTol}};
}

inline SolveReport describe_solve(const WorstCaseResult& r, const ParameterRegistry& reg,
                                  bool conform) {
  SolveReport s;
  s.status = worst_case_status_name(r.status);
  s.value = r.value;
  s.conform = conform;
  s.active_gaps = r.active_gaps;
  s.warnings = r.warnings;
  for (const auto& [id, v] : r.outer_point) s.worst_deviations[reg.at(id).name] = v;
  for (const auto& [id, v] : r.inner_point) s.worst_shifts[reg.at(id).name] = v;
  for (const auto& [id, v] : r.divergence_ray) s.divergence_ray[reg.at(id).name] = v;
  return s;
}

// ---- JSON form ---------------------------------------------------------------

namespace detail {

inline Json solve_json(const SolveReport& s) {
  Json j{{"status", s.status},
         {"value", s.value},
         {"conform", s.conform},
         {"active_gaps", s.active_gaps},
         {"warnings", s.warnings},
         {"worst_deviations", Json(s.worst_deviations)},
         {"worst_shifts", Json(s.worst_shifts)}};
  if (s.complete) j["complete"] = *s.complete;
  if (!s.divergence_ray.empty()) j["divergence_ray"] = Json(s.divergence_ray);
  return j;
}

inline SolveReport solve_from_json(const Json& j) {
  SolveReport s;
  s.status = j.at("status").get<std::string>();
  s.value = j.at("value").get<double>();
  s.conform = j.at("conform").get<bool>();
  if (j.contains("complete")) s.complete = j.at("complete").get<bool>();
  s.active_gaps = j.at("active_gaps").get<std::vector<std::string>>();
  s.warnings = j.at("warnings").get<std::vector<std::string>>();
  s.worst_deviations = j.at("worst_deviations").get<std::map<std::string, double>>();
  s.worst_shifts = j.at("worst_shifts").get<std::map<std::string, double>>();
  if (j.contains("divergence_ray"))
    s.divergence_ray = j.at("divergence_ray").get<std::map<std::string, double>>();
  return s;
}

inline Json spec_json(const ManufacturingSpec& s) {
  return Json{{"setup", s.setup},
              {"surface", s.surface},
              {"datums", s.datums},
              {"zone", {{"type", zone_type_name(s.zone.type)}, {"width", s.zone.width}}}};
}

inline ManufacturingSpec spec_from_json(const Json& j) {
  ManufacturingSpec s;
  s.setup = j.at("setup").get<int>();
  s.surface = j.at("surface").get<int>();
  s.datums = j.at("datums").get<std::vector<int>>();
  s.zone.type = j.at("zone").at("type").get<std::string>() == "orientation"
                    ? ZoneSpec::Type::orientation
                    : ZoneSpec::Type::location;
  s.zone.width = j.at("zone").at("width").get<double>();
  return s;
}

}  // namespace detail

inline Json to_json(const Report& r) {
  Json j;
  j["run"] = {{"command", r.run.command},
              {"plan", r.run.plan_source},
              {"solver", r.run.solver},
              {"starts", r.run.starts},
              {"seed", r.run.seed}};
  j["units"] = {{"length", "mm"}, {"angle", "rad"}};
  j["tolerances"] = Json(r.tolerances);
  if (r.analysis) j["analysis"] = detail::solve_json(*r.analysis);
  if (r.influence) {
    Json rows = Json::array();
    for (const InfluenceRow& row : r.influence->rows)
      rows.push_back({{"setup", row.setup},
                      {"surface", row.surface},
                      {"role", surface_role_name(row.role)},
                      {"parameter", row.parameter},
                      {"kind", kind_name(row.kind)},
                      {"coefficient", row.coefficient},
                      {"influential", row.influential}});
    j["influence"] = std::move(rows);
  }
  if (r.proposals) {
    Json props = Json::array();
    for (const SpecProposal& p : *r.proposals)
      props.push_back({{"spec", detail::spec_json(p.spec)}, {"notes", p.notes}});
    j["proposals"] = std::move(props);
  }
  if (r.verification) j["verification"] = detail::solve_json(*r.verification);
  if (r.sizing) {
    Json sized = Json::array();
    for (const ManufacturingSpec& s : r.sizing->sized) sized.push_back(detail::spec_json(s));
    j["sizing"] = {{"scale", r.sizing->scale},
                   {"worst_value", r.sizing->worst_value},
                   {"evaluations", r.sizing->evaluations},
                   {"sized", std::move(sized)}};
  }
  if (r.redundancy) {
    Json flags = Json::array();
    for (const RedundancyReport& f : *r.redundancy)
      flags.push_back({{"setup", f.setup},
                       {"surface", f.surface},
                       {"unnecessary", f.unnecessary},
                       {"value_without", f.value_without},
                       {"divergent_without", f.divergent_without}});
    j["redundancy"] = std::move(flags);
  }
  return j;
}

inline Report report_from_json(const Json& j) {
  Report r;
  const Json& run = j.at("run");
  r.run.command = run.at("command").get<std::string>();
  r.run.plan_source = run.at("plan").get<std::string>();
  r.run.solver = run.at("solver").get<std::string>();
  r.run.starts = run.at("starts").get<int>();
  r.run.seed = run.at("seed").get<unsigned>();
  r.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
  if (j.contains("analysis")) r.analysis = detail::solve_from_json(j.at("analysis"));
  if (j.contains("influence")) {
    InfluenceTable t;
    for (const Json& row : j.at("influence")) {
      InfluenceRow ir;
      ir.setup = row.at("setup").get<int>();
      ir.surface = row.at("surface").get<int>();
      ir.role = row.at("role").get<std::string>() == "machined" ? SurfaceRole::machined
                                                                : SurfaceRole::positioning;
      ir.parameter = row.at("parameter").get<std::string>();
      if (auto k = kind_from_name(row.at("kind").get<std::string>())) ir.kind = *k;
      ir.coefficient = row.at("coefficient").get<double>();
      ir.influential = row.at("influential").get<bool>();
      t.rows.push_back(std::move(ir));
    }
    r.influence = std::move(t);
  }
  if (j.contains("proposals")) {
    std::vector<SpecProposal> props;
    for (const Json& p : j.at("proposals")) {
      SpecProposal sp;
      sp.spec = detail::spec_from_json(p.at("spec"));
      sp.notes = p.at("notes").get<std::vector<std::string>>();
      props.push_back(std::move(sp));
    }
    r.proposals = std::move(props);
  }
  if (j.contains("verification")) r.verification = detail::solve_from_json(j.at("verification"));
  if (j.contains("sizing")) {
    SizingResult s;
    s.scale = j.at("sizing").at("scale").get<double>();
    s.worst_value = j.at("sizing").at("worst_value").get<double>();
    s.evaluations = j.at("sizing").at("evaluations").get<int>();
    for (const Json& js : j.at("sizing").at("sized"))
      s.sized.push_back(detail::spec_from_json(js));
    r.sizing = std::move(s);
  }
  if (j.contains("redundancy")) {
    std::vector<RedundancyReport> flags;
    for (const Json& f : j.at("redundancy")) {
      RedundancyReport rf;
      rf.setup = f.at("setup").get<int>();
      rf.surface = f.at("surface").get<int>();
      rf.unnecessary = f.at("unnecessary").get<bool>();
      rf.value_without = f.at("value_without").get<double>();
      rf.divergent_without = f.at("divergent_without").get<bool>();
      flags.push_back(rf);
    }
    r.redundancy = std::move(flags);
  }
  return r;
}

// ---- text form ---------------------------------------------------------------

namespace detail {

inline bool rotation_parameter(const std::string& name) {
  const auto parsed = parse_param_name(name);
  return parsed && is_rotation(parsed->kind);
}

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Radians annotated with degrees, per the reporting convention for angles.
inline std::string angle(double v) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.9g rad (%.6g deg)", v, v * 180.0 / M_PI);
  return buf;
}

inline void print_point(std::ostringstream& out, const char* title,
                        const std::map<std::string, double>& point) {
  if (point.empty()) return;
  out << title << "\n";
  for (const auto& [name, v] : point) {
    out << "  " << name << " = ";
    out << (rotation_parameter(name) ? angle(v) : num(v) + " mm");
    out << "\n";
  }
}

inline void print_solve(std::ostringstream& out, const std::string& heading,
                        const SolveReport& s) {
  out << "[" << heading << "]\n";
  out << "status: " << s.status << "\n";
  if (s.complete) out << "complete: " << (*s.complete ? "yes" : "no") << "\n";
  if (s.status == "optimal") {
    out << "worst functional slack: " << num(s.value) << " mm -> "
        << (s.conform ? "CONFORM" : "NON-CONFORM") << "\n";
    if (!s.active_gaps.empty()) {
      out << "active zone boundaries:";
      for (const std::string& g : s.active_gaps) out << " " << g;
      out << "\n";
    }
  } else if (s.status == "divergent") {
    out << "the functional gap diverges to negative values along:\n";
    for (const auto& [name, v] : s.divergence_ray)
      out << "  " << name << " = " << num(v) << "\n";
  }
  print_point(out, "worst process deviations:", s.worst_deviations);
  print_point(out, "worst residual shifts:", s.worst_shifts);
  for (const std::string& w : s.warnings) out << "warning: " << w << "\n";
  out << "\n";
}

inline std::string datum_frame(const std::vector<int>& datums) {
  if (datums.empty()) return "(none)";
  std::string s;
  for (int d : datums) s += "|" + std::to_string(d);
  return s + "|";
}

inline void print_spec(std::ostringstream& out, const ManufacturingSpec& s) {
  out << "set-up " << s.setup << ", surface " << s.surface << ": "
      << zone_type_name(s.zone.type) << " zone, datums " << datum_frame(s.datums);
  if (s.zone.width > 0)
    out << ", width " << num(s.zone.width) << " mm";
  else
    out << ", width to be sized";
  out << "\n";
}

}  // namespace detail

inline std::string render_text(const Report& r) {
  std::ostringstream out;
  out << "tolerance report: " << r.run.command << "\n";
  out << "plan: " << r.run.plan_source << "\n";
  out << "solver: " << r.run.solver << ", starts " << r.run.starts << ", seed " << r.run.seed
      << "\n";
  out << "units: lengths mm, angles rad\n\n";

  if (r.analysis) detail::print_solve(out, "analysis", *r.analysis);

  if (r.influence) {
    out << "[influence]\n";
    out << "set-up  surface  role         kind  parameter       |coefficient|\n";
    for (const InfluenceRow& row : r.influence->rows) {
      char line[128];
      char coef[32] = "";
      if (row.coefficient != 0) std::snprintf(coef, sizeof coef, "%.2f", row.coefficient);
      std::snprintf(line, sizeof line, "%-7d %-8d %-12s %-5s %-15s %s\n", row.setup, row.surface,
                    surface_role_name(row.role), kind_name(row.kind), row.parameter.c_str(),
                    coef);
      out << line;
    }
    out << "\n";
  }

  if (r.proposals) {
    out << "[proposals]\n";
    if (r.proposals->empty()) out << "no specification needed\n";
    for (const SpecProposal& p : *r.proposals) {
      detail::print_spec(out, p.spec);
      for (const std::string& n : p.notes) out << "  note: " << n << "\n";
    }
    out << "\n";
  }

  if (r.verification) detail::print_solve(out, "verification", *r.verification);

  if (r.sizing) {
    out << "[sizing]\n";
    out << "scale: " << detail::num(r.sizing->scale) << "\n";
    out << "worst value at sized widths: " << detail::num(r.sizing->worst_value) << " mm\n";
    out << "evaluations: " << r.sizing->evaluations << "\n";
    for (const ManufacturingSpec& s : r.sizing->sized) detail::print_spec(out, s);
    out << "\n";
  }

  if (r.redundancy) {
    out << "[redundancy]\n";
    for (const RedundancyReport& f : *r.redundancy) {
      out << "set-up " << f.setup << ", surface " << f.surface << ": ";
      if (f.unnecessary)
        out << "UNNECESSARY (value without it " << detail::num(f.value_without) << ")";
      else if (f.divergent_without)
        out << "required (problem diverges without it)";
      else
        out << "required (value without it " << detail::num(f.value_without) << ")";
      out << "\n";
    }
    out << "\n";
  }

  out << "tolerances:";
  for (const auto& [k, v] : r.tolerances) out << " " << k << "=" << detail::num(v);
  out << "\n";
  return out.str();
}

}  // namespace sdtol
