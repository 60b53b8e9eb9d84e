#pragma once

#include <string>
#include <vector>

#include "sdtol/gauge.hpp"

namespace sdtol {

// One proposed manufacturing specification: a zone on a surface machined in a
// set-up, referenced to a datum system built from that set-up's positioning
// surfaces.
struct ManufacturingSpec {
  int setup = 0;
  int surface = -1;
  std::vector<int> datums;  // hierarchy order
  ZoneSpec zone;
};

inline std::string spec_gauge_tag(const ManufacturingSpec& s) {
  return "MG" + std::to_string(s.setup) + "N" + std::to_string(s.surface);
}

// Adversarial variables of both analysis and verification: every process defect
// parameter, in registry order.
inline std::vector<ParamId> process_parameters(const ParameterRegistry& reg) {
  std::vector<ParamId> out;
  for (const DefectParameter& p : reg.all())
    if (p.category == ParamCategory::dm || p.category == ParamCategory::dh ||
        p.category == ParamCategory::lhp)
      out.push_back(p.id);
  return out;
}

struct AnalysisProblem {
  OptimizationProblem problem;
  AssembledGauge gauge;  // functional gauge
};

// Worst functional gap over the declared defect ranges: outer = process defects
// under their boxes plus contact rows; inner = functional gauge associations.
inline AnalysisProblem build_analysis_problem(const MMP& mmp, const NominalPart& part,
                                              VirtualGauge functional, ParameterRegistry& reg,
                                              const SampleConfig& sampling = {}) {
  AnalysisProblem out;
  functional.manufacturing = false;
  out.gauge = assemble_gauge(mmp, part, functional, reg, sampling);
  out.problem.registry = &reg;
  out.problem.outer = process_parameters(reg);
  out.problem.inner = out.gauge.mobility_params;
  for (ParamId id : out.gauge.zone_params) out.problem.inner.push_back(id);
  out.problem.outer_rows = mmp.constraints;
  out.problem.gaps = out.gauge.gaps;
  return out;
}

struct VerificationProblem {
  OptimizationProblem problem;
  AssembledGauge functional;
  std::vector<AssembledGauge> spec_gauges;  // aligned with the spec list
};

// Worst functional gap over every part the proposed manufacturing
// specifications would accept: machined-surface deviation boxes and authored
// machine-capability rows are released, and each specification instead
// contributes an inspection gauge whose gaps must stay nonnegative. The
// inspection gauges' residual mobilities are adversarial witnesses: if some
// gauge fit passes the part, the adversary may use it.
inline VerificationProblem build_verification_problem(const MMP& mmp, const NominalPart& part,
                                                      VirtualGauge functional,
                                                      const std::vector<ManufacturingSpec>& specs,
                                                      ParameterRegistry& reg,
                                                      const SampleConfig& sampling = {}) {
  VerificationProblem out;
  functional.manufacturing = false;
  out.functional = assemble_gauge(mmp, part, functional, reg, sampling);
  out.problem.registry = &reg;
  out.problem.outer = process_parameters(reg);
  out.problem.inner = out.functional.mobility_params;
  for (ParamId id : out.functional.zone_params) out.problem.inner.push_back(id);
  out.problem.gaps = out.functional.gaps;

  for (const DefectParameter& p : reg.all())
    if (p.category == ParamCategory::dm && p.setup > 0)
      out.problem.bound_overrides[p.id] = std::nullopt;
  for (const LinearConstraint& c : mmp.constraints)
    if (c.tag != ConstraintTag::cm) out.problem.outer_rows.push_back(c);

  for (const ManufacturingSpec& s : specs) {
    VirtualGauge mg;
    mg.datums = s.datums;
    mg.toleranced = s.surface;
    mg.zone = s.zone;
    mg.manufacturing = true;
    mg.tag = spec_gauge_tag(s);
    const MMP state = truncated_at(mmp, s.setup);
    AssembledGauge ag = assemble_gauge(state, part, mg, reg, sampling);
    for (ParamId id : ag.mobility_params) out.problem.outer.push_back(id);
    for (ParamId id : ag.zone_params) out.problem.outer.push_back(id);
    for (const GapExpr& gap : ag.gaps) {
      LinearConstraint row;
      row.expr = gap.expr;
      row.sense = Sense::ge;
      row.bound = 0;
      row.tag = ConstraintTag::gap_mgp;
      row.label = gap.label;
      row.setup = s.setup;
      out.problem.outer_rows.push_back(std::move(row));
    }
    out.spec_gauges.push_back(std::move(ag));
  }
  return out;
}

}  // namespace sdtol
