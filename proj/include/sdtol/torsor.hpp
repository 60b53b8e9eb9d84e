#pragma once

#include <array>
#include <string>

#include "sdtol/linexpr.hpp"
#include "sdtol/vec.hpp"

namespace sdtol {

enum class SurfaceClass { plane, cylinder };

inline const char* surface_class_name(SurfaceClass c) {
  return c == SurfaceClass::plane ? "plane" : "cylinder";
}

// Kinds a surface class can deviate in, expressed in its local frame (z = plane
// normal / cylinder axis). The remaining kinds are invariant motions of the
// surface and stay identically zero.
struct SurfaceClassTemplate {
  SurfaceClass cls;
  std::vector<Kind> free_kinds;  // canonical kind order
};

inline const SurfaceClassTemplate& plane_template() {
  static const SurfaceClassTemplate t{SurfaceClass::plane, {Kind::rx, Kind::ry, Kind::tz}};
  return t;
}
inline const SurfaceClassTemplate& cylinder_template() {
  static const SurfaceClassTemplate t{
      SurfaceClass::cylinder, {Kind::rx, Kind::ry, Kind::tx, Kind::ty, Kind::ra}};
  return t;
}
inline const SurfaceClassTemplate& class_template(SurfaceClass c) {
  return c == SurfaceClass::plane ? plane_template() : cylinder_template();
}

inline std::vector<Kind> invariant_kinds(SurfaceClass c) {
  if (c == SurfaceClass::plane) return {Kind::rz, Kind::tx, Kind::ty};
  return {Kind::rz, Kind::tz};
}

struct NumericTorsor {
  Vec3 rotation;
  Vec3 translation;
  double radius = 0;  // ra component, zero for planes
};

// Small displacement torsor: three rotation and three translation components,
// each a linear form over defect parameters. Components are expressed in the
// basis named by `frame`; `point` is where the translation field is sampled,
// in that same basis. Convention: u(B) = u(A) + rotation x (B - A).
// Cylindrical surfaces carry a scalar radius deviation alongside; it is
// transport- and basis-invariant.
class Torsor {
 public:
  Torsor() = default;
  Torsor(std::array<LinExpr, 3> rot, std::array<LinExpr, 3> trans, Vec3 point, std::string frame)
      : rot_(std::move(rot)), trans_(std::move(trans)), point_(point), frame_(std::move(frame)) {}

  static Torsor zero(Vec3 point, std::string frame) {
    return Torsor({}, {}, point, std::move(frame));
  }

  const LinExpr& rotation(int i) const { return rot_[static_cast<size_t>(i)]; }
  const LinExpr& translation(int i) const { return trans_[static_cast<size_t>(i)]; }
  LinExpr& rotation(int i) { return rot_[static_cast<size_t>(i)]; }
  LinExpr& translation(int i) { return trans_[static_cast<size_t>(i)]; }
  const Vec3& point() const { return point_; }
  const std::string& frame() const { return frame_; }
  const LinExpr& radius() const { return ra_; }
  LinExpr& radius() { return ra_; }

  // Move the translation sample point; rotations are transport-invariant.
  Torsor transport(const Vec3& target) const {
    const Vec3 d = target - point_;
    Torsor out = *this;
    out.point_ = target;
    // rotation x d, with numeric d
    out.trans_[0] = trans_[0] + rot_[1] * d.z - rot_[2] * d.y;
    out.trans_[1] = trans_[1] + rot_[2] * d.x - rot_[0] * d.z;
    out.trans_[2] = trans_[2] + rot_[0] * d.y - rot_[1] * d.x;
    return out;
  }

  // Re-express components in another basis: new_comp = R^T * old_comp when R maps
  // the new basis into the old one, or directly new = M * old for a given M.
  // Here `m` multiplies component vectors; the sample point is unchanged.
  Torsor with_components_mapped(const Mat3& m, std::string new_frame) const {
    Torsor out = *this;
    out.frame_ = std::move(new_frame);
    for (int i = 0; i < 3; ++i) {
      const Vec3 row{m.column(0)[i], m.column(1)[i], m.column(2)[i]};
      out.rot_[static_cast<size_t>(i)] =
          rot_[0] * row.x + rot_[1] * row.y + rot_[2] * row.z;
      out.trans_[static_cast<size_t>(i)] =
          trans_[0] * row.x + trans_[1] * row.y + trans_[2] * row.z;
    }
    return out;
  }

  // Relabel the sample point without transporting (used when converting a torsor
  // written at a local origin into global coordinates of that same location).
  Torsor at_point(const Vec3& p) const {
    Torsor out = *this;
    out.point_ = p;
    return out;
  }

  Torsor operator-() const {
    Torsor out = *this;
    for (auto& e : out.rot_) e = -e;
    for (auto& e : out.trans_) e = -e;
    out.ra_ = -out.ra_;
    return out;
  }

  // Component-wise sum; the right operand is transported to this sample point.
  Torsor operator+(const Torsor& o) const {
    if (frame_ != o.frame_)
      throw FrameMismatch("torsor add: frame '" + frame_ + "' vs '" + o.frame_ + "'");
    const Torsor ot = o.transport(point_);
    Torsor out = *this;
    for (int i = 0; i < 3; ++i) {
      out.rot_[static_cast<size_t>(i)] += ot.rot_[static_cast<size_t>(i)];
      out.trans_[static_cast<size_t>(i)] += ot.trans_[static_cast<size_t>(i)];
    }
    out.ra_ += ot.ra_;
    return out;
  }
  Torsor operator-(const Torsor& o) const { return *this + (-o); }

  NumericTorsor evaluate(const Assignment& a, bool missing_as_zero = false) const {
    NumericTorsor n;
    n.rotation = {rot_[0].evaluate(a, missing_as_zero), rot_[1].evaluate(a, missing_as_zero),
                  rot_[2].evaluate(a, missing_as_zero)};
    n.translation = {trans_[0].evaluate(a, missing_as_zero),
                     trans_[1].evaluate(a, missing_as_zero),
                     trans_[2].evaluate(a, missing_as_zero)};
    n.radius = ra_.evaluate(a, missing_as_zero);
    return n;
  }

  // Translation field at a point, as linear forms.
  std::array<LinExpr, 3> displacement_at(const Vec3& p) const {
    const Torsor t = transport(p);
    return {t.trans_[0], t.trans_[1], t.trans_[2]};
  }

 private:
  std::array<LinExpr, 3> rot_;
  std::array<LinExpr, 3> trans_;
  Vec3 point_;
  std::string frame_ = "global";
  LinExpr ra_;
};

// Register fresh deviation parameters for a surface of the given class and build
// its torsor in the surface local frame at the local origin. Plane: {rx, ry, tz};
// cylinder: {rx, ry, tx, ty} plus the scalar radius deviation. Parameter names
// follow the canonical scheme for the category (machined kind_i, holder kind_iSj).
inline Torsor new_surface_torsor(const SurfaceClassTemplate& tmpl, int surface, int setup,
                                 ParamCategory category, ParameterRegistry& registry) {
  if (category != ParamCategory::dm && category != ParamCategory::dh)
    throw Error("new_surface_torsor: only machining/holder categories take class templates");
  Torsor t = Torsor::zero({0, 0, 0}, "surface:" + std::to_string(surface));
  for (Kind k : tmpl.free_kinds) {
    const std::string name =
        category == ParamCategory::dm ? dm_name(k, surface) : dh_name(k, surface, setup);
    const ParamId id = registry.add({-1, name, k, surface, setup, category, std::nullopt});
    const LinExpr term = LinExpr::param(id);
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
  return t;
}

}  // namespace sdtol
