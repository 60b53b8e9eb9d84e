#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sdtol/problems.hpp"

namespace sdtol {

inline constexpr double kInfluenceActiveTol = 1e-9;  // below this a cell is blank
inline constexpr double kSizingValueTol = 1e-3;      // accepted residual at the sized scale
inline constexpr double kSizingScaleTol = 1e-7;      // relative bracket width at termination
inline constexpr double kRedundancyTol = 1e-9;       // value drift of a removable spec

inline bool translation_kind(Kind k) {
  return k == Kind::tx || k == Kind::ty || k == Kind::tz || k == Kind::ra;
}

// ---- influence table --------------------------------------------------------

enum class SurfaceRole { machined, positioning };

inline const char* surface_role_name(SurfaceRole r) {
  return r == SurfaceRole::machined ? "machined" : "positioning";
}

// One row per process defect parameter: which set-up introduced it, which
// surface it lives on, and the magnitude of its worst-case gradient. Set-up 0
// rows describe raw (never machined) surfaces.
struct InfluenceRow {
  int setup = 0;
  int surface = -1;
  SurfaceRole role = SurfaceRole::machined;
  std::string parameter;
  Kind kind = Kind::tz;
  double coefficient = 0;  // magnitude; exact 0 means blank
  bool influential = false;
};

struct InfluenceTable {
  std::vector<InfluenceRow> rows;  // registry order: raw block, then per set-up
};

inline InfluenceTable influence_table(const std::map<ParamId, double>& gradients,
                                      const ParameterRegistry& reg) {
  InfluenceTable t;
  for (const DefectParameter& p : reg.all()) {
    if (p.category != ParamCategory::dm && p.category != ParamCategory::dh &&
        p.category != ParamCategory::lhp)
      continue;
    auto it = gradients.find(p.id);
    const double g = it == gradients.end() ? 0.0 : std::abs(it->second);
    InfluenceRow row;
    row.setup = p.setup;
    row.surface = p.surface;
    row.role = p.category == ParamCategory::dm ? SurfaceRole::machined : SurfaceRole::positioning;
    row.parameter = p.name;
    row.kind = p.kind;
    row.influential = g >= kInfluenceActiveTol;
    row.coefficient = row.influential ? g : 0.0;
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---- classification ----------------------------------------------------------

struct SurfaceActivity {
  int surface = -1;
  bool rotation = false;     // some influential rx/ry/rz
  bool translation = false;  // some influential tx/ty/tz/ra
};

struct SetupClassification {
  int setup = 0;
  std::vector<SurfaceActivity> positioning;  // hierarchy order
  std::vector<SurfaceActivity> machined;     // machining order
};

// Group influential rows per set-up: positioning surfaces in the set-up's
// hierarchy order, machined surfaces in machining order, each with the defect
// categories its influential parameters fall in.
inline std::vector<SetupClassification> classify_parameters(const InfluenceTable& table,
                                                            const ProcessPlan& plan) {
  std::map<std::pair<int, int>, SurfaceActivity> positioning;  // (setup, surface)
  std::map<int, SurfaceActivity> machined;                     // surface (unique producer)
  for (const InfluenceRow& r : table.rows) {
    if (!r.influential) continue;
    SurfaceActivity& a = r.role == SurfaceRole::positioning
                             ? positioning[{r.setup, r.surface}]
                             : machined[r.surface];
    a.surface = r.surface;
    (translation_kind(r.kind) ? a.translation : a.rotation) = true;
  }

  std::vector<SetupClassification> out;
  for (const SetUp& su : plan.setups) {
    SetupClassification c;
    c.setup = su.id;
    std::vector<const ElementaryConnection*> conns;
    for (const auto& conn : su.connections) conns.push_back(&conn);
    std::sort(conns.begin(), conns.end(),
              [](const auto* a, const auto* b) { return a->rank < b->rank; });
    for (const auto* conn : conns) {
      auto it = positioning.find({su.id, conn->part_surface});
      if (it != positioning.end()) c.positioning.push_back(it->second);
    }
    for (const auto& op : su.machining) {
      auto it = machined.find(op.surface);
      if (it != machined.end()) c.machined.push_back(it->second);
    }
    if (!c.positioning.empty() || !c.machined.empty()) out.push_back(std::move(c));
  }
  return out;
}

// ---- specification proposal ---------------------------------------------------

struct SpecProposal {
  ManufacturingSpec spec;  // zone width left 0 until sized
  std::vector<std::string> notes;
};

// One specification per influential machined surface of each set-up: a location
// zone when any translation defect matters, an orientation zone when only
// rotations do. The datum system lists the set-up's influential positioning
// surfaces in hierarchy order.
inline std::vector<SpecProposal> propose_specs(const std::vector<SetupClassification>& cls) {
  std::vector<SpecProposal> out;
  for (const SetupClassification& c : cls) {
    std::vector<int> datums;
    for (const SurfaceActivity& p : c.positioning) datums.push_back(p.surface);
    for (const SurfaceActivity& m : c.machined) {
      SpecProposal prop;
      prop.spec.setup = c.setup;
      prop.spec.surface = m.surface;
      prop.spec.datums = datums;
      prop.spec.zone.type =
          m.translation ? ZoneSpec::Type::location : ZoneSpec::Type::orientation;
      prop.spec.zone.width = 0;
      if (datums.empty())
        prop.notes.push_back("set-up " + std::to_string(c.setup) +
                             " has no influential positioning surface; datum system is empty");
      out.push_back(std::move(prop));
    }
  }
  return out;
}

// ---- verification (released machining, gauges as constraints) ------------------

struct VerificationOutcome {
  WorstCaseResult result;
  bool complete = false;  // worst case bounded: every released direction is held
  bool conform = false;   // complete and the functional gap never goes negative
  ParameterRegistry registry;  // names the result's parameter ids
};

// Rebuilds registry, model state, and gauges from scratch: gauge assembly
// registers parameters, so evaluations at different widths must not share state.
inline VerificationOutcome verify_specs(const ProcessPlan& plan, const VirtualGauge& functional,
                                        const std::vector<ManufacturingSpec>& specs,
                                        const SolverOptions& opt) {
  ParameterRegistry reg = registry_of(plan);
  const MMP mmp = build_mmp(plan, reg);
  const VerificationProblem vp =
      build_verification_problem(mmp, plan.part, functional, specs, reg, plan.sampling);
  VerificationOutcome out;
  out.result = worst_case(vp.problem, opt);
  out.complete = out.result.status == WorstCaseStatus::optimal;
  out.conform = out.complete && out.result.value >= 0;
  out.registry = std::move(reg);
  return out;
}

// ---- sizing ---------------------------------------------------------------------

struct SizingResult {
  std::vector<ManufacturingSpec> sized;
  double scale = 0;        // factor applied to the input widths
  double worst_value = 0;  // verification value at the returned widths
  int evaluations = 0;
};

// Largest uniform scale on the proposal widths that keeps the verification value
// nonnegative. Input widths act as relative weights; non-positive widths weigh 1.
// The value is non-increasing in the scale, so bisection brackets the crossing;
// iteration stops once the bracket is relatively tight and the kept (feasible)
// end's value has dropped into the acceptance window.
inline SizingResult size_tolerances(const ProcessPlan& plan, const VirtualGauge& functional,
                                    std::vector<ManufacturingSpec> specs,
                                    const SolverOptions& opt) {
  for (ManufacturingSpec& s : specs)
    if (!(s.zone.width > 0)) s.zone.width = 1.0;

  SizingResult out;
  SolverOptions fast = opt;
  auto value_at = [&](double alpha, bool certify) -> double {
    std::vector<ManufacturingSpec> scaled = specs;
    for (ManufacturingSpec& s : scaled) s.zone.width *= alpha;
    fast.assume_bounded = !certify;
    const VerificationOutcome v = verify_specs(plan, functional, scaled, fast);
    ++out.evaluations;
    if (!certify) return v.result.value;
    if (v.result.status == WorstCaseStatus::divergent)
      throw Error("tolerance sizing needs a complete specification set; verification diverges");
    if (v.result.status == WorstCaseStatus::infeasible)
      throw Error("tolerance sizing: verification constraints are infeasible");
    return v.result.value;
  };

  // Divergence depends only on the released directions, never on the zone
  // widths, so one certified solve covers every scale probed below.
  double lo = 1.0, vlo = value_at(lo, true);
  double hi;
  if (vlo >= 0) {
    hi = 2.0;
    double vhi = value_at(hi, false);
    int guard = 0;
    while (vhi >= 0) {
      lo = hi;
      vlo = vhi;
      hi *= 2;
      vhi = value_at(hi, false);
      if (++guard > 60)
        throw Error("tolerance sizing: the functional worst case never binds the "
                    "specification widths");
    }
  } else {
    hi = 1.0;
    lo = 0.5;
    vlo = value_at(lo, false);
    int guard = 0;
    while (vlo < 0) {
      hi = lo;
      lo /= 2;
      vlo = value_at(lo, false);
      if (++guard > 200)
        throw Error("tolerance sizing: functional tolerance unreachable even with "
                    "vanishing manufacturing tolerances");
    }
  }

  int guard = 0;
  while ((hi - lo > kSizingScaleTol * hi || vlo > kSizingValueTol) && ++guard <= 200) {
    const double mid = 0.5 * (lo + hi);
    const double vmid = value_at(mid, false);
    if (vmid >= 0) {
      lo = mid;
      vlo = vmid;
    } else {
      hi = mid;
    }
  }

  out.scale = lo;
  out.worst_value = vlo;
  out.sized = std::move(specs);
  for (ManufacturingSpec& s : out.sized) s.zone.width *= lo;
  return out;
}

// ---- redundancy ------------------------------------------------------------------

struct RedundancyFlag {
  bool unnecessary = false;
  double value_without = 0;  // verification value with the spec removed
  bool divergent_without = false;
};

// A specification is unnecessary when removing it neither unbounds the problem
// nor moves the verification value. Each re-solve rebuilds its own registry and
// model, so the per-spec probes run concurrently; results keep input order.
inline std::vector<RedundancyFlag> detect_redundant(const ProcessPlan& plan,
                                                    const VirtualGauge& functional,
                                                    const std::vector<ManufacturingSpec>& specs,
                                                    const SolverOptions& opt,
                                                    const VerificationOutcome& baseline) {
  auto probe = [&](size_t i) {
    std::vector<ManufacturingSpec> rest;
    for (size_t k = 0; k < specs.size(); ++k)
      if (k != i) rest.push_back(specs[k]);
    const VerificationOutcome v = verify_specs(plan, functional, rest, opt);
    RedundancyFlag f;
    f.divergent_without = v.result.status == WorstCaseStatus::divergent;
    f.value_without = v.complete ? v.result.value : 0;
    f.unnecessary = v.complete && baseline.complete &&
                    std::abs(v.result.value - baseline.result.value) < kRedundancyTol;
    return f;
  };
  std::vector<RedundancyFlag> out(specs.size());
  const unsigned workers = std::max<unsigned>(
      1, std::min<size_t>(std::thread::hardware_concurrency(), specs.size()));
  std::atomic<size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto drain = [&] {
    try {
      for (size_t i = cursor.fetch_add(1); i < specs.size(); i = cursor.fetch_add(1))
        out[i] = probe(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(drain);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace sdtol
