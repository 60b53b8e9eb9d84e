#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sdtol/lp.hpp"
#include "sdtol/process.hpp"

namespace sdtol {

// A requirement gap: conformity means every gap stays nonnegative.
struct GapExpr {
  LinExpr expr;
  std::string label;
};

// Worst case of min_j gap_j over adversarial (outer) parameters, where benevolent
// (inner) parameters re-associate freely for each outer choice:
//     minimize over outer x in X:   V(x) = max over inner y:  min_j gap_j(x, y)
// X = parameter boxes (from the registry) intersected with the outer rows.
struct OptimizationProblem {
  std::vector<ParamId> outer;
  std::vector<ParamId> inner;
  std::vector<LinearConstraint> outer_rows;
  std::vector<GapExpr> gaps;
  const ParameterRegistry* registry = nullptr;
  // Per-problem replacement of registry boxes (nullopt = treat as unbounded):
  // verification drops the boxes of spec-covered parameters without touching
  // the shared registry.
  std::map<ParamId, std::optional<Interval>> bound_overrides;
};

enum class WorstCaseStatus { optimal, divergent, infeasible };

inline const char* worst_case_status_name(WorstCaseStatus s) {
  switch (s) {
    case WorstCaseStatus::optimal: return "optimal";
    case WorstCaseStatus::divergent: return "divergent";
    case WorstCaseStatus::infeasible: return "infeasible";
  }
  return "?";
}

struct WorstCaseResult {
  WorstCaseStatus status = WorstCaseStatus::infeasible;
  double value = 0;
  Assignment outer_point;
  Assignment inner_point;
  std::vector<std::string> active_gaps;
  std::vector<std::string> warnings;
  Assignment divergence_ray;  // nonzero entries certify the runaway direction
};

struct SolverOptions {
  enum class Mode { enumerate, iterative };
  Mode mode = Mode::iterative;
  int starts = 16;
  unsigned seed = 1;
  // Skip the recession-slope certification. Only valid when an earlier solve of a
  // problem with the same homogeneous part (gaps and rows may differ in constants
  // only) already came back bounded; divergence cannot depend on the constants.
  bool assume_bounded = false;
};

inline constexpr double kWorstTieTol = 1e-12;
inline constexpr double kDivergenceTol = 1e-9;
inline constexpr double kInfluenceStep = 1e-7;
inline constexpr double kInfluenceBlankTol = 1e-9;
inline constexpr int kEnumerateDimGuard = 20;
inline constexpr double kClipBound = 1e7;

namespace detail {

// Dense view of an OptimizationProblem over fixed outer/inner orderings.
struct DenseProblem {
  int n = 0;                      // outer dimension
  std::vector<ParamId> outer;     // dense index -> id
  std::map<ParamId, int> outer_index;
  std::vector<double> lo, hi;     // box, +-inf when absent
  struct Row {
    std::vector<double> a;
    LpSense sense;
    double b;
  };
  std::vector<Row> rows;          // outer rows (pins appended during prepare)
  std::vector<ParamId> inner;
  std::map<ParamId, int> inner_index;
  struct Gap {
    std::vector<double> a;        // outer coefficients
    std::vector<double> biny;     // inner coefficients
    double c = 0;
    std::string label;
  };
  std::vector<Gap> gaps;
};

inline DenseProblem densify(const OptimizationProblem& p) {
  if (!p.registry) throw SolveError("optimization problem lacks a registry");
  DenseProblem d;
  d.n = static_cast<int>(p.outer.size());
  d.outer = p.outer;
  for (int k = 0; k < d.n; ++k) d.outer_index[p.outer[static_cast<size_t>(k)]] = k;
  d.inner = p.inner;
  for (size_t k = 0; k < p.inner.size(); ++k)
    d.inner_index[p.inner[k]] = static_cast<int>(k);
  const double inf = std::numeric_limits<double>::infinity();
  d.lo.assign(static_cast<size_t>(d.n), -inf);
  d.hi.assign(static_cast<size_t>(d.n), inf);
  for (int k = 0; k < d.n; ++k) {
    const ParamId id = p.outer[static_cast<size_t>(k)];
    std::optional<Interval> box = p.registry->at(id).bounds;
    auto ov = p.bound_overrides.find(id);
    if (ov != p.bound_overrides.end()) box = ov->second;
    if (box) {
      d.lo[static_cast<size_t>(k)] = box->lower;
      d.hi[static_cast<size_t>(k)] = box->upper;
    }
  }
  for (const auto& r : p.outer_rows) {
    DenseProblem::Row row;
    row.a.assign(static_cast<size_t>(d.n), 0.0);
    for (const auto& [id, c] : r.expr.terms()) {
      auto it = d.outer_index.find(id);
      if (it == d.outer_index.end())
        throw SolveError("outer row '" + r.label + "' uses a non-outer parameter");
      row.a[static_cast<size_t>(it->second)] = c;
    }
    row.sense = r.sense == Sense::le ? LpSense::le : LpSense::ge;
    row.b = r.bound - r.expr.constant_term();
    d.rows.push_back(std::move(row));
  }
  for (const auto& g : p.gaps) {
    DenseProblem::Gap gap;
    gap.a.assign(static_cast<size_t>(d.n), 0.0);
    gap.biny.assign(p.inner.size(), 0.0);
    gap.c = g.expr.constant_term();
    gap.label = g.label;
    for (const auto& [id, c] : g.expr.terms()) {
      auto oit = d.outer_index.find(id);
      if (oit != d.outer_index.end()) {
        gap.a[static_cast<size_t>(oit->second)] = c;
        continue;
      }
      auto iit = d.inner_index.find(id);
      if (iit == d.inner_index.end())
        throw SolveError("gap '" + g.label + "' uses an unpartitioned parameter");
      gap.biny[static_cast<size_t>(iit->second)] = c;
    }
    d.gaps.push_back(std::move(gap));
  }
  return d;
}

struct InnerResult {
  bool feasible = false;
  double value = 0;
  std::vector<double> supergradient;  // d value / d outer_k
  std::vector<double> y;              // best inner point
  std::vector<int> active;            // gap indices achieving the min
};

// Best association at a fixed outer point: epigraph LP  max s, s <= gap_j(x, y).
inline InnerResult inner_value(const DenseProblem& d, const std::vector<double>& x,
                               const LpSolver& lp) {
  InnerResult out;
  if (d.gaps.empty()) throw SolveError("no gaps to optimize");
  const int ny = static_cast<int>(d.inner.size());
  LpProblem p;
  p.num_vars = ny + 1;
  p.objective.assign(static_cast<size_t>(ny + 1), 0.0);
  p.objective[static_cast<size_t>(ny)] = 1.0;
  for (const auto& g : d.gaps) {
    LpProblem::Row row;
    row.a.assign(static_cast<size_t>(ny + 1), 0.0);
    for (int k = 0; k < ny; ++k) row.a[static_cast<size_t>(k)] = -g.biny[static_cast<size_t>(k)];
    row.a[static_cast<size_t>(ny)] = 1.0;
    double rhs = g.c;
    for (int k = 0; k < d.n; ++k) rhs += g.a[static_cast<size_t>(k)] * x[static_cast<size_t>(k)];
    row.sense = LpSense::le;
    row.b = rhs;
    p.rows.push_back(std::move(row));
  }
  const LpSolution sol = lp.solve(p);
  if (sol.status == LpStatus::unbounded)
    throw SolveError("association problem is unbounded: gaps do not limit the zone");
  if (sol.status != LpStatus::optimal) return out;  // infeasible
  out.feasible = true;
  out.value = sol.value;
  out.y.assign(sol.x.begin(), sol.x.begin() + ny);
  out.supergradient.assign(static_cast<size_t>(d.n), 0.0);
  for (size_t j = 0; j < d.gaps.size(); ++j)
    for (int k = 0; k < d.n; ++k)
      out.supergradient[static_cast<size_t>(k)] +=
          sol.duals[j] * d.gaps[j].a[static_cast<size_t>(k)];
  for (size_t j = 0; j < d.gaps.size(); ++j) {
    double gv = d.gaps[j].c;
    for (int k = 0; k < d.n; ++k)
      gv += d.gaps[j].a[static_cast<size_t>(k)] * x[static_cast<size_t>(k)];
    for (int k = 0; k < ny; ++k)
      gv += d.gaps[j].biny[static_cast<size_t>(k)] * out.y[static_cast<size_t>(k)];
    if (gv <= out.value + 1e-9) out.active.push_back(static_cast<int>(j));
  }
  return out;
}

// Outer feasible-region LP: maximize c . x over X (boxes as rows, clip for the
// unbounded coordinates so vertex hops stay finite).
inline LpProblem outer_lp(const DenseProblem& d, const std::vector<double>& c, bool clip) {
  LpProblem p;
  p.num_vars = d.n;
  p.objective = c;
  for (const auto& r : d.rows) p.rows.push_back({r.a, r.sense, r.b});
  for (int k = 0; k < d.n; ++k) {
    std::vector<double> e(static_cast<size_t>(d.n), 0.0);
    e[static_cast<size_t>(k)] = 1.0;
    double lo = d.lo[static_cast<size_t>(k)], hi = d.hi[static_cast<size_t>(k)];
    if (clip) {
      if (!std::isfinite(lo)) lo = -kClipBound;
      if (!std::isfinite(hi)) hi = kClipBound;
    }
    if (std::isfinite(hi)) p.rows.push_back({e, LpSense::le, hi});
    if (std::isfinite(lo)) p.rows.push_back({e, LpSense::ge, lo});
  }
  return p;
}

inline bool satisfies_rows(const DenseProblem& d, const std::vector<double>& x, double tol) {
  for (const auto& r : d.rows) {
    double v = 0;
    for (int k = 0; k < d.n; ++k) v += r.a[static_cast<size_t>(k)] * x[static_cast<size_t>(k)];
    if (r.sense == LpSense::le && v > r.b + tol) return false;
    if (r.sense == LpSense::ge && v < r.b - tol) return false;
    if (r.sense == LpSense::eq && std::abs(v - r.b) > tol) return false;
  }
  return true;
}

inline bool lex_less(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - tol) return true;
    if (a[i] > b[i] + tol) return false;
  }
  return false;
}

// Two-sided free directions the constraints cannot see. Along such directions the
// value is provably flat once recession slopes are certified nonnegative, so the
// search is sliced to the orthogonal subspace by equality pins.
inline std::vector<std::vector<double>> lineality_basis(const DenseProblem& d) {
  std::vector<int> free_coords;
  for (int k = 0; k < d.n; ++k)
    if (!std::isfinite(d.lo[static_cast<size_t>(k)]) &&
        !std::isfinite(d.hi[static_cast<size_t>(k)]))
      free_coords.push_back(k);
  std::vector<std::vector<double>> span;  // row normals restricted to free coords
  for (const auto& r : d.rows) {
    std::vector<double> v(free_coords.size(), 0.0);
    for (size_t i = 0; i < free_coords.size(); ++i)
      v[i] = r.a[static_cast<size_t>(free_coords[i])];
    for (const auto& s : span) {
      double proj = 0;
      for (size_t i = 0; i < v.size(); ++i) proj += v[i] * s[i];
      for (size_t i = 0; i < v.size(); ++i) v[i] -= proj * s[i];
    }
    double nrm = 0;
    for (double e : v) nrm += e * e;
    nrm = std::sqrt(nrm);
    if (nrm > 1e-12) {
      for (double& e : v) e /= nrm;
      span.push_back(std::move(v));
    }
  }
  std::vector<std::vector<double>> basis;
  for (size_t i = 0; i < free_coords.size(); ++i) {
    std::vector<double> v(free_coords.size(), 0.0);
    v[i] = 1.0;
    for (const auto& s : span) {
      double proj = 0;
      for (size_t k = 0; k < v.size(); ++k) proj += v[k] * s[k];
      for (size_t k = 0; k < v.size(); ++k) v[k] -= proj * s[k];
    }
    for (const auto& s : basis) {
      double proj = 0;
      for (size_t k = 0; k < v.size(); ++k) proj += v[k] * s[k];
      for (size_t k = 0; k < v.size(); ++k) v[k] -= proj * s[k];
    }
    double nrm = 0;
    for (double e : v) nrm += e * e;
    nrm = std::sqrt(nrm);
    if (nrm > 1e-9) {
      for (double& e : v) e /= nrm;
      basis.push_back(v);
    }
  }
  // Expand back to full coordinates.
  std::vector<std::vector<double>> full;
  for (const auto& v : basis) {
    std::vector<double> f(static_cast<size_t>(d.n), 0.0);
    for (size_t i = 0; i < free_coords.size(); ++i)
      f[static_cast<size_t>(free_coords[i])] = v[i];
    full.push_back(std::move(f));
  }
  return full;
}

}  // namespace detail

// Best association of the inner links once the outer defects are committed:
// max over the inner parameters of the min gap, at the given outer point.
// Outer parameters absent from the assignment read as zero.
struct InnerSolve {
  bool feasible = false;
  double value = 0;
  Assignment inner;  // an optimal link assignment
};

inline InnerSolve inner_max_min(const OptimizationProblem& p, const Assignment& outer) {
  const detail::DenseProblem d = detail::densify(p);
  std::vector<double> x(static_cast<size_t>(d.n), 0.0);
  for (int k = 0; k < d.n; ++k) {
    const auto it = outer.find(d.outer[static_cast<size_t>(k)]);
    if (it != outer.end()) x[static_cast<size_t>(k)] = it->second;
  }
  const DenseSimplexSolver lp;
  const detail::InnerResult r = detail::inner_value(d, x, lp);
  InnerSolve out;
  out.feasible = r.feasible;
  out.value = r.value;
  if (r.feasible)
    for (size_t k = 0; k < d.inner.size(); ++k) out.inner[d.inner[k]] = r.y[k];
  return out;
}

// Exact worst case by extreme-point enumeration. Usable when the outer region is
// a box of moderate dimension, or a polytope with few facets.
inline WorstCaseResult worst_case_enumerate(const OptimizationProblem& p,
                                            const SolverOptions& opt) {
  using namespace detail;
  const DenseProblem d = densify(p);
  const DenseSimplexSolver lp;
  WorstCaseResult out;

  for (int k = 0; k < d.n; ++k)
    if (!std::isfinite(d.lo[static_cast<size_t>(k)]) ||
        !std::isfinite(d.hi[static_cast<size_t>(k)]))
      throw SolveError("enumeration requires two-sided parameter bounds");
  if (d.n > kEnumerateDimGuard)
    throw SolveError("enumeration dimension guard exceeded (" + std::to_string(d.n) + " > " +
                     std::to_string(kEnumerateDimGuard) + ")");

  std::vector<std::vector<double>> points;
  if (d.rows.empty()) {
    const size_t corners = size_t{1} << d.n;
    points.reserve(corners);
    for (size_t mask = 0; mask < corners; ++mask) {
      std::vector<double> x(static_cast<size_t>(d.n));
      for (int k = 0; k < d.n; ++k)
        x[static_cast<size_t>(k)] =
            (mask >> k) & 1 ? d.hi[static_cast<size_t>(k)] : d.lo[static_cast<size_t>(k)];
      points.push_back(std::move(x));
    }
  } else {
    // Vertices = choices of n active facets among rows and box sides, equalities
    // always active.
    std::vector<std::pair<std::vector<double>, double>> facets;  // normal, rhs
    std::vector<std::pair<std::vector<double>, double>> fixed;
    for (const auto& r : d.rows) {
      if (r.sense == LpSense::eq)
        fixed.push_back({r.a, r.b});
      else
        facets.push_back({r.a, r.b});
    }
    for (int k = 0; k < d.n; ++k) {
      std::vector<double> e(static_cast<size_t>(d.n), 0.0);
      e[static_cast<size_t>(k)] = 1.0;
      facets.push_back({e, d.hi[static_cast<size_t>(k)]});
      e[static_cast<size_t>(k)] = -1.0;
      facets.push_back({e, -d.lo[static_cast<size_t>(k)]});
    }
    const int need = d.n - static_cast<int>(fixed.size());
    if (need < 0) throw SolveError("more equality pins than dimensions");
    const size_t fcount = facets.size();
    std::vector<int> pick(static_cast<size_t>(need));
    for (int i = 0; i < need; ++i) pick[static_cast<size_t>(i)] = i;
    long combos = 1;
    for (int i = 0; i < need; ++i) {
      combos = combos * static_cast<long>(fcount - static_cast<size_t>(i)) / (i + 1);
      if (combos > 200000) throw SolveError("facet combination cap exceeded");
    }
    auto emit = [&]() {
      std::vector<std::vector<double>> a;
      std::vector<double> b;
      for (const auto& [n0, b0] : fixed) {
        a.push_back(n0);
        b.push_back(b0);
      }
      for (int i : pick) {
        a.push_back(facets[static_cast<size_t>(i)].first);
        b.push_back(facets[static_cast<size_t>(i)].second);
      }
      std::vector<double> x;
      if (!solve_dense(a, b, x)) return;
      for (int k = 0; k < d.n; ++k) {
        if (x[static_cast<size_t>(k)] < d.lo[static_cast<size_t>(k)] - 1e-9) return;
        if (x[static_cast<size_t>(k)] > d.hi[static_cast<size_t>(k)] + 1e-9) return;
      }
      if (!satisfies_rows(d, x, 1e-9)) return;
      points.push_back(std::move(x));
    };
    if (need == 0) {
      emit();
    } else {
      while (true) {
        emit();
        int i = need - 1;
        while (i >= 0 &&
               pick[static_cast<size_t>(i)] ==
                   static_cast<int>(fcount) - (need - i))
          --i;
        if (i < 0) break;
        ++pick[static_cast<size_t>(i)];
        for (int k = i + 1; k < need; ++k)
          pick[static_cast<size_t>(k)] = pick[static_cast<size_t>(k - 1)] + 1;
      }
    }
    if (points.empty()) {
      out.status = WorstCaseStatus::infeasible;
      return out;
    }
  }

  bool found = false;
  std::vector<double> best_x;
  InnerResult best_inner;
  for (const auto& x : points) {
    const InnerResult r = inner_value(d, x, lp);
    if (!r.feasible) {
      out.status = WorstCaseStatus::infeasible;
      return out;
    }
    if (!found || r.value < best_inner.value - kWorstTieTol ||
        (r.value < best_inner.value + kWorstTieTol && lex_less(x, best_x, kWorstTieTol))) {
      found = true;
      best_x = x;
      best_inner = r;
    }
  }
  if (!found) {
    out.status = WorstCaseStatus::infeasible;
    return out;
  }
  out.status = WorstCaseStatus::optimal;
  out.value = best_inner.value;
  for (int k = 0; k < d.n; ++k)
    out.outer_point[d.outer[static_cast<size_t>(k)]] = best_x[static_cast<size_t>(k)];
  for (size_t k = 0; k < d.inner.size(); ++k) out.inner_point[d.inner[k]] = best_inner.y[k];
  for (int j : best_inner.active) out.active_gaps.push_back(d.gaps[static_cast<size_t>(j)].label);
  return out;
}

// Heuristic worst case for higher dimensions: random-objective vertex starts, then
// repeated linearization descent with single-coordinate escape flips. Deterministic
// for a fixed seed; reports a warning instead of failing when the iteration budget
// runs out.
inline WorstCaseResult worst_case_iterative(const OptimizationProblem& p,
                                            const SolverOptions& opt,
                                            const std::vector<std::vector<double>>* seed_dirs =
                                                nullptr) {
  using namespace detail;
  const DenseProblem d = densify(p);
  const DenseSimplexSolver lp;
  WorstCaseResult out;

  {  // outer feasibility
    const LpSolution probe =
        lp.solve(outer_lp(d, std::vector<double>(static_cast<size_t>(d.n), 0.0), true));
    if (probe.status == LpStatus::infeasible) {
      out.status = WorstCaseStatus::infeasible;
      return out;
    }
  }

  std::mt19937 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  bool found = false;
  bool clipped = false;
  std::vector<double> best_x;
  InnerResult best_inner;

  const int starts = std::max(1, opt.starts);
  for (int s = 0; s < starts; ++s) {
    std::vector<double> c(static_cast<size_t>(d.n));
    if (seed_dirs && s < static_cast<int>(seed_dirs->size())) {
      c = (*seed_dirs)[static_cast<size_t>(s)];
    } else {
      for (auto& e : c) e = gauss(rng);
    }
    LpSolution start = lp.solve(outer_lp(d, c, true));
    if (start.status != LpStatus::optimal) continue;
    std::vector<double> x = start.x;

    InnerResult cur = inner_value(d, x, lp);
    if (!cur.feasible) {
      out.status = WorstCaseStatus::infeasible;
      return out;
    }
    bool stalled = false;
    for (int iter = 0; iter < 80 && !stalled; ++iter) {
      // Linearization hop: the supergradient's argmin vertex only improves (the
      // linearization over-estimates a concave value everywhere).
      std::vector<double> negg(static_cast<size_t>(d.n));
      for (int k = 0; k < d.n; ++k) negg[static_cast<size_t>(k)] =
          -cur.supergradient[static_cast<size_t>(k)];
      const LpSolution hop = lp.solve(outer_lp(d, negg, true));
      bool moved = false;
      if (hop.status == LpStatus::optimal) {
        double gain = 0;
        for (int k = 0; k < d.n; ++k)
          gain += cur.supergradient[static_cast<size_t>(k)] *
                  (hop.x[static_cast<size_t>(k)] - x[static_cast<size_t>(k)]);
        if (gain < -kWorstTieTol) {
          const InnerResult next = inner_value(d, hop.x, lp);
          if (!next.feasible) {
            out.status = WorstCaseStatus::infeasible;
            return out;
          }
          if (next.value < cur.value - kWorstTieTol) {
            x = hop.x;
            cur = next;
            moved = true;
          }
        }
      }
      auto flipped = [&](std::vector<double> from, int k) {
        const double lo = d.lo[static_cast<size_t>(k)], hi = d.hi[static_cast<size_t>(k)];
        const double mid = 0.5 * (lo + hi);
        from[static_cast<size_t>(k)] = from[static_cast<size_t>(k)] > mid ? lo : hi;
        return from;
      };
      auto flippable = [&](int k) {
        const double lo = d.lo[static_cast<size_t>(k)], hi = d.hi[static_cast<size_t>(k)];
        return std::isfinite(lo) && std::isfinite(hi) && lo != hi;
      };
      if (!moved) {
        // First-order stall: flip the single bounded coordinate that helps most.
        double best_value = cur.value;
        InnerResult best_next;
        std::vector<double> best_flip;
        for (int k = 0; k < d.n; ++k) {
          if (!flippable(k)) continue;
          std::vector<double> flip = flipped(x, k);
          if (!satisfies_rows(d, flip, 1e-9)) continue;
          const InnerResult next = inner_value(d, flip, lp);
          if (next.feasible && next.value < best_value - kWorstTieTol) {
            best_value = next.value;
            best_next = next;
            best_flip = std::move(flip);
          }
        }
        if (!best_flip.empty()) {
          x = std::move(best_flip);
          cur = std::move(best_next);
          moved = true;
        }
      }
      if (!moved) {
        // Deeper stall: coordinated pair flips leave saddle corners that block
        // every single-coordinate move.
        for (int k1 = 0; k1 < d.n && !moved; ++k1) {
          if (!flippable(k1)) continue;
          for (int k2 = k1 + 1; k2 < d.n && !moved; ++k2) {
            if (!flippable(k2)) continue;
            std::vector<double> flip = flipped(flipped(x, k1), k2);
            if (!satisfies_rows(d, flip, 1e-9)) continue;
            const InnerResult next = inner_value(d, flip, lp);
            if (next.feasible && next.value < cur.value - kWorstTieTol) {
              x = std::move(flip);
              cur = next;
              moved = true;
            }
          }
        }
      }
      if (!moved) stalled = true;
      if (iter == 79 && !stalled)
        out.warnings.push_back("descent iteration budget exhausted; best point kept");
    }
    for (int k = 0; k < d.n; ++k)
      if (std::abs(x[static_cast<size_t>(k)]) > 0.1 * kClipBound) clipped = true;
    if (!found || cur.value < best_inner.value - kWorstTieTol ||
        (cur.value < best_inner.value + kWorstTieTol && lex_less(x, best_x, kWorstTieTol))) {
      found = true;
      best_x = x;
      best_inner = cur;
    }
  }
  if (!found) {
    out.status = WorstCaseStatus::infeasible;
    return out;
  }
  if (clipped)
    out.warnings.push_back("worst point rests on the safety clip of an unbounded parameter");
  out.status = WorstCaseStatus::optimal;
  out.value = best_inner.value;
  for (int k = 0; k < d.n; ++k)
    out.outer_point[d.outer[static_cast<size_t>(k)]] = best_x[static_cast<size_t>(k)];
  for (size_t k = 0; k < d.inner.size(); ++k) out.inner_point[d.inner[k]] = best_inner.y[k];
  for (int j : best_inner.active) out.active_gaps.push_back(d.gaps[static_cast<size_t>(j)].label);
  return out;
}

// Full pipeline: prune parameters the problem cannot see, certify boundedness via
// recession slopes, slice away flat free subspaces, then dispatch.
inline WorstCaseResult worst_case(const OptimizationProblem& p, const SolverOptions& opt) {
  using namespace detail;
  OptimizationProblem work = p;

  // Prune outer parameters that neither gaps nor rows mention: their value is
  // irrelevant, and without bounds they would masquerade as runaway directions.
  {
    std::set<ParamId> seen;
    for (const auto& g : p.gaps)
      for (const auto& [id, c] : g.expr.terms()) seen.insert(id);
    for (const auto& r : p.outer_rows)
      for (const auto& [id, c] : r.expr.terms()) seen.insert(id);
    std::vector<ParamId> kept;
    std::vector<ParamId> pruned;
    for (ParamId id : p.outer)
      (seen.count(id) ? kept : pruned).push_back(id);
    work.outer = kept;
    if (!pruned.empty()) {
      WorstCaseResult sub = worst_case(work, opt);
      for (ParamId id : pruned) sub.outer_point[id] = 0.0;
      return sub;
    }
  }

  DenseProblem d = densify(work);

  // Boundedness: any admissible recession direction with a negative asymptotic
  // slope lets the requirement run away.
  bool all_bounded = true;
  for (int k = 0; k < d.n; ++k)
    if (!std::isfinite(d.lo[static_cast<size_t>(k)]) ||
        !std::isfinite(d.hi[static_cast<size_t>(k)]))
      all_bounded = false;
  WorstCaseResult out;
  if (!all_bounded && opt.assume_bounded) {
    // Caller certified boundedness on an earlier solve; still slice the flat free
    // subspace so iterates stay canonical.
    for (const auto& dir : lineality_basis(d)) {
      LinearConstraint pin;
      for (int k = 0; k < d.n; ++k)
        if (dir[static_cast<size_t>(k)] != 0.0)
          pin.expr.add_term(d.outer[static_cast<size_t>(k)], dir[static_cast<size_t>(k)]);
      pin.sense = Sense::le;
      pin.bound = 0;
      pin.label = "flat_direction_pin";
      work.outer_rows.push_back(pin);
      pin.sense = Sense::ge;
      work.outer_rows.push_back(pin);
    }
  } else if (!all_bounded) {
    std::vector<std::vector<double>> seeds;
    for (int k = 0; k < d.n && static_cast<int>(seeds.size()) < 2 * kEnumerateDimGuard; ++k) {
      if (std::isfinite(d.lo[static_cast<size_t>(k)]) &&
          std::isfinite(d.hi[static_cast<size_t>(k)]))
        continue;
      std::vector<double> e(static_cast<size_t>(d.n), 0.0);
      e[static_cast<size_t>(k)] = 1.0;
      seeds.push_back(e);
      e[static_cast<size_t>(k)] = -1.0;
      seeds.push_back(std::move(e));
    }
    SolverOptions ropt = opt;
    ropt.starts = std::max(opt.starts, static_cast<int>(seeds.size()) + 4);
    WorstCaseResult slope;
    {
      OptimizationProblem rec;
      rec.registry = work.registry;
      rec.inner = work.inner;
      rec.outer = work.outer;
      // Keep the caller's releases: a registry box would otherwise pin the very
      // directions whose recession slopes are being certified.
      rec.bound_overrides = work.bound_overrides;
      for (GapExpr g : work.gaps) {
        g.expr -= LinExpr::constant(g.expr.constant_term());
        rec.gaps.push_back(std::move(g));
      }
      for (LinearConstraint r : work.outer_rows) {
        r.expr -= LinExpr::constant(r.expr.constant_term());
        r.bound = 0;
        rec.outer_rows.push_back(std::move(r));
      }
      for (int k = 0; k < d.n; ++k) {
        const ParamId id = d.outer[static_cast<size_t>(k)];
        const bool has_lo = std::isfinite(d.lo[static_cast<size_t>(k)]);
        const bool has_hi = std::isfinite(d.hi[static_cast<size_t>(k)]);
        LinearConstraint up;
        up.expr = LinExpr::param(id);
        up.sense = Sense::le;
        up.label = "recession_box";
        up.bound = (has_lo && has_hi) ? 0.0 : (has_hi ? 0.0 : 1.0);
        LinearConstraint dn = up;
        dn.sense = Sense::ge;
        dn.bound = (has_lo && has_hi) ? 0.0 : (has_lo ? 0.0 : -1.0);
        rec.outer_rows.push_back(up);
        rec.outer_rows.push_back(dn);
      }
      slope = worst_case_iterative(rec, ropt, &seeds);
    }
    if (slope.status == WorstCaseStatus::optimal && slope.value < -kDivergenceTol) {
      out.status = WorstCaseStatus::divergent;
      out.value = -std::numeric_limits<double>::infinity();
      for (const auto& [id, v] : slope.outer_point)
        if (std::abs(v) > 1e-6) out.divergence_ray[id] = v;
      out.warnings = slope.warnings;
      return out;
    }
    for (const auto& w : slope.warnings) out.warnings.push_back(w);

    // Flat two-sided free directions: pin them so vertex hops stay finite.
    for (const auto& dir : lineality_basis(d)) {
      LinearConstraint pin;
      for (int k = 0; k < d.n; ++k)
        if (dir[static_cast<size_t>(k)] != 0.0)
          pin.expr.add_term(d.outer[static_cast<size_t>(k)], dir[static_cast<size_t>(k)]);
      // One equality slice per direction; emitted as a matched le/ge pair.
      pin.sense = Sense::le;
      pin.bound = 0;
      pin.label = "flat_direction_pin";
      work.outer_rows.push_back(pin);
      pin.sense = Sense::ge;
      work.outer_rows.push_back(pin);
    }
  }

  WorstCaseResult res = opt.mode == SolverOptions::Mode::enumerate
                            ? worst_case_enumerate(work, opt)
                            : worst_case_iterative(work, opt);
  for (const auto& w : out.warnings) res.warnings.push_back(w);
  return res;
}

// Sensitivity of the worst-case value to each outer parameter at the worst point.
// Uses symmetric differences where the value is smooth and the larger one-sided
// slope at kinks; entries below the blank threshold are reported as exact zeros.
inline std::map<ParamId, double> influence_coefficients(const OptimizationProblem& p,
                                                        const WorstCaseResult& at) {
  using namespace detail;
  const DenseProblem d = densify(p);
  const DenseSimplexSolver lp;
  std::map<ParamId, double> out;
  std::vector<double> x(static_cast<size_t>(d.n), 0.0);
  for (int k = 0; k < d.n; ++k) {
    auto it = at.outer_point.find(d.outer[static_cast<size_t>(k)]);
    x[static_cast<size_t>(k)] = it == at.outer_point.end() ? 0.0 : it->second;
  }
  const double v0 = inner_value(d, x, lp).value;
  for (int k = 0; k < d.n; ++k) {
    const double h = kInfluenceStep;
    std::vector<double> xp = x, xm = x;
    xp[static_cast<size_t>(k)] += h;
    xm[static_cast<size_t>(k)] -= h;
    const InnerResult rp = inner_value(d, xp, lp);
    const InnerResult rm = inner_value(d, xm, lp);
    double coef;
    if (!rp.feasible || !rm.feasible) {
      coef = 0.0;
    } else {
      const double dplus = (rp.value - v0) / h;
      const double dminus = (v0 - rm.value) / h;
      if (std::abs(dplus - dminus) <= 1e-6 * std::max(1.0, std::abs(dplus)))
        coef = (rp.value - rm.value) / (2 * h);
      else
        coef = std::abs(dplus) >= std::abs(dminus) ? dplus : dminus;
    }
    if (std::abs(coef) < kInfluenceBlankTol) coef = 0.0;
    out[d.outer[static_cast<size_t>(k)]] = coef;
  }
  // Parameters pruned before dispatch keep an explicit zero influence.
  for (const auto& [id, v] : at.outer_point)
    if (!out.count(id)) out[id] = 0.0;
  return out;
}

}  // namespace sdtol
