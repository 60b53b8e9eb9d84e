#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sdtol/error.hpp"
#include "sdtol/vec.hpp"

namespace sdtol {

enum class LpSense { le, ge, eq };
enum class LpStatus { optimal, infeasible, unbounded };

// maximize objective . x  subject to row senses; variables are free.
struct LpProblem {
  int num_vars = 0;
  std::vector<double> objective;
  struct Row {
    std::vector<double> a;
    LpSense sense = LpSense::le;
    double b = 0;
  };
  std::vector<Row> rows;
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double value = 0;
  std::vector<double> x;      // optimal point (empty unless optimal)
  std::vector<double> duals;  // dValue/db per row (empty unless optimal)
};

class LpSolver {
 public:
  virtual ~LpSolver() = default;
  virtual LpSolution solve(const LpProblem& p) const = 0;
};

inline constexpr double kLpPivotTol = 1e-9;
inline constexpr double kLpFeasTol = 1e-9;

// Two-phase primal simplex on a dense tableau. Free variables are split into
// nonnegative pairs, rows with negative right-hand sides are negated, equalities
// and surplus rows get artificials. Bland's rule keeps the walk finite. Meant for
// the small, dense systems this library produces, not for large models.
class DenseSimplexSolver : public LpSolver {
 public:
  LpSolution solve(const LpProblem& p) const override {
    const int nv = p.num_vars;
    const int m = static_cast<int>(p.rows.size());
    if (static_cast<int>(p.objective.size()) != nv)
      throw SolveError("objective size does not match variable count");

    // Column layout: [u_0..u_nv) [v_0..v_nv) [slacks] [artificials].
    int n_slack = 0;
    for (const auto& r : p.rows)
      if (r.sense != LpSense::eq) ++n_slack;

    std::vector<bool> negated(static_cast<size_t>(m), false);
    std::vector<int> slack_col(static_cast<size_t>(m), -1);
    std::vector<int> art_col(static_cast<size_t>(m), -1);

    int next_slack = 2 * nv;
    int n_art = 0;
    for (int i = 0; i < m; ++i) {
      const auto& r = p.rows[static_cast<size_t>(i)];
      if (static_cast<int>(r.a.size()) != nv)
        throw SolveError("row " + std::to_string(i) + " has wrong width");
      negated[static_cast<size_t>(i)] = r.b < 0;
      if (r.sense != LpSense::eq) slack_col[static_cast<size_t>(i)] = next_slack++;
      const bool slack_is_basis =
          (r.sense == LpSense::le && !negated[static_cast<size_t>(i)]) ||
          (r.sense == LpSense::ge && negated[static_cast<size_t>(i)]);
      if (!slack_is_basis) ++n_art;
    }
    const int first_art = 2 * nv + n_slack;
    const int n_cols = first_art + n_art;

    // Original standardized system, kept for dual recovery.
    std::vector<std::vector<double>> a0(
        static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(n_cols), 0.0));
    std::vector<double> b0(static_cast<size_t>(m), 0.0);
    std::vector<int> basis(static_cast<size_t>(m), -1);
    {
      int next_art = first_art;
      for (int i = 0; i < m; ++i) {
        const auto& r = p.rows[static_cast<size_t>(i)];
        const double s = negated[static_cast<size_t>(i)] ? -1.0 : 1.0;
        auto& row = a0[static_cast<size_t>(i)];
        for (int j = 0; j < nv; ++j) {
          row[static_cast<size_t>(j)] = s * r.a[static_cast<size_t>(j)];
          row[static_cast<size_t>(nv + j)] = -s * r.a[static_cast<size_t>(j)];
        }
        if (r.sense != LpSense::eq)
          row[static_cast<size_t>(slack_col[static_cast<size_t>(i)])] =
              s * (r.sense == LpSense::le ? 1.0 : -1.0);
        b0[static_cast<size_t>(i)] = s * r.b;
        const bool slack_is_basis =
            r.sense != LpSense::eq &&
            row[static_cast<size_t>(slack_col[static_cast<size_t>(i)])] > 0.5;
        if (slack_is_basis) {
          basis[static_cast<size_t>(i)] = slack_col[static_cast<size_t>(i)];
        } else {
          row[static_cast<size_t>(next_art)] = 1.0;
          art_col[static_cast<size_t>(i)] = next_art;
          basis[static_cast<size_t>(i)] = next_art++;
        }
      }
    }

    // Working tableau.
    std::vector<std::vector<double>> t(
        static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(n_cols) + 1, 0.0));
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n_cols; ++j)
        t[static_cast<size_t>(i)][static_cast<size_t>(j)] =
            a0[static_cast<size_t>(i)][static_cast<size_t>(j)];
      t[static_cast<size_t>(i)][static_cast<size_t>(n_cols)] = b0[static_cast<size_t>(i)];
    }

    auto pivot = [&](int pr, int pc) {
      auto& prow = t[static_cast<size_t>(pr)];
      const double pv = prow[static_cast<size_t>(pc)];
      for (double& e : prow) e /= pv;
      for (int i = 0; i < m; ++i) {
        if (i == pr) continue;
        auto& row = t[static_cast<size_t>(i)];
        const double f = row[static_cast<size_t>(pc)];
        if (f == 0.0) continue;
        for (int j = 0; j <= n_cols; ++j)
          row[static_cast<size_t>(j)] -= f * prow[static_cast<size_t>(j)];
      }
      basis[static_cast<size_t>(pr)] = pc;
    };

    // Bland's rule walk on the given costs; returns false when unbounded.
    const long iter_guard = 2000L + 50L * (m + n_cols);
    auto run = [&](const std::vector<double>& cost, int col_limit) -> bool {
      for (long iter = 0; iter < iter_guard; ++iter) {
        std::vector<double> y(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i) y[static_cast<size_t>(i)] =
            cost[static_cast<size_t>(basis[static_cast<size_t>(i)])];
        int enter = -1;
        for (int j = 0; j < col_limit && enter < 0; ++j) {
          double r = cost[static_cast<size_t>(j)];
          for (int i = 0; i < m; ++i)
            r -= y[static_cast<size_t>(i)] * t[static_cast<size_t>(i)][static_cast<size_t>(j)];
          if (r > kLpPivotTol) enter = j;
        }
        if (enter < 0) return true;
        int leave = -1;
        double best = 0;
        for (int i = 0; i < m; ++i) {
          const double aij = t[static_cast<size_t>(i)][static_cast<size_t>(enter)];
          if (aij <= kLpPivotTol) continue;
          const double ratio = t[static_cast<size_t>(i)][static_cast<size_t>(n_cols)] / aij;
          if (leave < 0 || ratio < best - kLpPivotTol ||
              (ratio < best + kLpPivotTol &&
               basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)]))
            leave = i, best = ratio;
        }
        if (leave < 0) return false;
        pivot(leave, enter);
      }
      throw SolveError("simplex iteration guard exceeded");
    };

    LpSolution out;
    if (n_art > 0) {
      std::vector<double> cost1(static_cast<size_t>(n_cols), 0.0);
      for (int i = 0; i < m; ++i)
        if (art_col[static_cast<size_t>(i)] >= 0)
          cost1[static_cast<size_t>(art_col[static_cast<size_t>(i)])] = -1.0;
      run(cost1, n_cols);
      double infeas = 0;
      for (int i = 0; i < m; ++i)
        if (basis[static_cast<size_t>(i)] >= first_art)
          infeas += t[static_cast<size_t>(i)][static_cast<size_t>(n_cols)];
      if (infeas > kLpFeasTol) {
        out.status = LpStatus::infeasible;
        out.value = -std::numeric_limits<double>::infinity();
        return out;
      }
      // Degenerate artificials: swap them for any real column when possible.
      for (int i = 0; i < m; ++i) {
        if (basis[static_cast<size_t>(i)] < first_art) continue;
        for (int j = 0; j < first_art; ++j)
          if (std::abs(t[static_cast<size_t>(i)][static_cast<size_t>(j)]) > kLpPivotTol) {
            pivot(i, j);
            break;
          }
      }
    }

    std::vector<double> cost2(static_cast<size_t>(n_cols), 0.0);
    for (int j = 0; j < nv; ++j) {
      cost2[static_cast<size_t>(j)] = p.objective[static_cast<size_t>(j)];
      cost2[static_cast<size_t>(nv + j)] = -p.objective[static_cast<size_t>(j)];
    }
    if (!run(cost2, first_art)) {
      out.status = LpStatus::unbounded;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }

    out.status = LpStatus::optimal;
    out.x.assign(static_cast<size_t>(nv), 0.0);
    for (int i = 0; i < m; ++i) {
      const int c = basis[static_cast<size_t>(i)];
      const double v = t[static_cast<size_t>(i)][static_cast<size_t>(n_cols)];
      if (c < nv)
        out.x[static_cast<size_t>(c)] += v;
      else if (c < 2 * nv)
        out.x[static_cast<size_t>(c - nv)] -= v;
    }
    out.value = 0;
    for (int j = 0; j < nv; ++j)
      out.value += p.objective[static_cast<size_t>(j)] * out.x[static_cast<size_t>(j)];

    // Duals from the final basis: solve B^T y = c_B against the untouched system.
    if (m > 0) {
      std::vector<std::vector<double>> bt(
          static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(m), 0.0));
      std::vector<double> cb(static_cast<size_t>(m), 0.0);
      for (int i = 0; i < m; ++i) {
        cb[static_cast<size_t>(i)] = cost2[static_cast<size_t>(basis[static_cast<size_t>(i)])];
        for (int r = 0; r < m; ++r)
          bt[static_cast<size_t>(i)][static_cast<size_t>(r)] =
              a0[static_cast<size_t>(r)][static_cast<size_t>(basis[static_cast<size_t>(i)])];
      }
      std::vector<double> y;
      if (!solve_dense(bt, cb, y)) throw SolveError("dual system is singular");
      out.duals.assign(static_cast<size_t>(m), 0.0);
      for (int i = 0; i < m; ++i)
        out.duals[static_cast<size_t>(i)] =
            negated[static_cast<size_t>(i)] ? -y[static_cast<size_t>(i)] : y[static_cast<size_t>(i)];
    }
    return out;
  }
};

}  // namespace sdtol
