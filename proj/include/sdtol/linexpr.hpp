#pragma once

#include <map>
#include <string>

#include "sdtol/params.hpp"

namespace sdtol {

using Assignment = std::map<ParamId, double>;

// Sparse linear form over defect parameters: sum(coef_i * p_i) + constant.
// Terms with exactly zero coefficient are never stored, so symbolic composition
// stays sparse; near-zero coefficients are kept (no epsilon pruning).
class LinExpr {
 public:
  LinExpr() = default;

  static LinExpr constant(double c) {
    LinExpr e;
    e.constant_ = c;
    return e;
  }
  static LinExpr param(ParamId id, double coef = 1.0) {
    LinExpr e;
    e.add_term(id, coef);
    return e;
  }

  void add_term(ParamId id, double coef) {
    if (coef == 0.0) return;
    auto [it, fresh] = terms_.emplace(id, coef);
    if (!fresh) {
      it->second += coef;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  LinExpr& operator+=(const LinExpr& o) {
    for (const auto& [id, c] : o.terms_) add_term(id, c);
    constant_ += o.constant_;
    return *this;
  }
  LinExpr& operator-=(const LinExpr& o) {
    for (const auto& [id, c] : o.terms_) add_term(id, -c);
    constant_ -= o.constant_;
    return *this;
  }
  LinExpr& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      constant_ = 0.0;
      return *this;
    }
    for (auto& [id, c] : terms_) c *= s;
    constant_ *= s;
    return *this;
  }

  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }
  LinExpr operator-() const {
    LinExpr e = *this;
    e *= -1.0;
    return e;
  }

  double coefficient(ParamId id) const {
    auto it = terms_.find(id);
    return it == terms_.end() ? 0.0 : it->second;
  }
  double constant_term() const { return constant_; }
  const std::map<ParamId, double>& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }

  // Missing parameters are an error unless the caller opts into zero defaults.
  double evaluate(const Assignment& a, bool missing_as_zero = false) const {
    double v = constant_;
    for (const auto& [id, c] : terms_) {
      auto it = a.find(id);
      if (it == a.end()) {
        if (!missing_as_zero)
          throw MissingParameter("assignment misses parameter id " + std::to_string(id));
        continue;
      }
      v += c * it->second;
    }
    return v;
  }

  // Dense fast path for solver loops: values indexed by ParamId, full coverage.
  double evaluate_dense(const std::vector<double>& by_id) const {
    double v = constant_;
    for (const auto& [id, c] : terms_) v += c * by_id[static_cast<size_t>(id)];
    return v;
  }

  bool same_as(const LinExpr& o, double tol = 0.0) const {
    if (std::abs(constant_ - o.constant_) > tol) return false;
    for (const auto& [id, c] : terms_)
      if (std::abs(c - o.coefficient(id)) > tol) return false;
    for (const auto& [id, c] : o.terms_)
      if (std::abs(c - coefficient(id)) > tol) return false;
    return true;
  }

 private:
  std::map<ParamId, double> terms_;
  double constant_ = 0.0;
};

}  // namespace sdtol
