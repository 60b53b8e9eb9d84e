#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "sdtol/error.hpp"

namespace sdtol {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Column-major 3x3 basis: columns are the x/y/z axes of a frame.
struct Mat3 {
  Vec3 cx, cy, cz;

  // M * v
  Vec3 apply(const Vec3& v) const {
    return {cx.x * v.x + cy.x * v.y + cz.x * v.z,
            cx.y * v.x + cy.y * v.y + cz.y * v.z,
            cx.z * v.x + cy.z * v.y + cz.z * v.z};
  }
  // M^T * v  (for orthonormal M this is the inverse)
  Vec3 apply_transposed(const Vec3& v) const {
    return {dot(cx, v), dot(cy, v), dot(cz, v)};
  }
  Vec3 column(int i) const { return i == 0 ? cx : (i == 1 ? cy : cz); }

  static Mat3 identity() { return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}; }
};

inline Mat3 transposed(const Mat3& m) {
  return {{m.cx.x, m.cy.x, m.cz.x}, {m.cx.y, m.cy.y, m.cz.y}, {m.cx.z, m.cy.z, m.cz.z}};
}

// Right-handed orthonormal placement of a surface or part.
struct Frame {
  Vec3 origin;
  Mat3 basis;  // columns: local x, y, z axes in global coordinates

  Vec3 to_global(const Vec3& local) const { return origin + basis.apply(local); }
  Vec3 to_local(const Vec3& global) const { return basis.apply_transposed(global - origin); }
  Vec3 axis_x() const { return basis.cx; }
  Vec3 axis_y() const { return basis.cy; }
  Vec3 axis_z() const { return basis.cz; }
};

inline constexpr double kFrameOrthoTol = 1e-12;

inline bool is_orthonormal(const Mat3& m, double tol = kFrameOrthoTol) {
  const Vec3 a = m.cx, b = m.cy, c = m.cz;
  return std::abs(dot(a, a) - 1) <= tol && std::abs(dot(b, b) - 1) <= tol &&
         std::abs(dot(c, c) - 1) <= tol && std::abs(dot(a, b)) <= tol &&
         std::abs(dot(a, c)) <= tol && std::abs(dot(b, c)) <= tol;
}

inline bool is_right_handed(const Mat3& m, double tol = kFrameOrthoTol) {
  return norm(cross(m.cx, m.cy) - m.cz) <= 10 * tol + 1e-12;
}

// Dense Gaussian elimination with partial pivoting; A is row-major n x n.
// Returns false when A is singular to working precision.
inline bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b,
                        std::vector<double>& x) {
  const int n = static_cast<int>(a.size());
  x.assign(n, 0.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-12) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return true;
}

// Inverse via repeated solves; throws on singular input.
inline std::vector<std::vector<double>> invert_dense(const std::vector<std::vector<double>>& a) {
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0), col;
    e[j] = 1.0;
    if (!solve_dense(a, e, col)) throw Error("invert_dense: singular matrix");
    for (int i = 0; i < n; ++i) inv[i][j] = col[i];
  }
  return inv;
}

}  // namespace sdtol
