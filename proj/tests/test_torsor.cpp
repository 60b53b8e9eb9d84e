#include <gtest/gtest.h>

#include "sdtol/torsor.hpp"

using namespace sdtol;

namespace {

Torsor numeric_torsor(Vec3 rot, Vec3 trans, Vec3 point, std::string frame = "global") {
  return Torsor({LinExpr::constant(rot.x), LinExpr::constant(rot.y), LinExpr::constant(rot.z)},
                {LinExpr::constant(trans.x), LinExpr::constant(trans.y),
                 LinExpr::constant(trans.z)},
                point, std::move(frame));
}

Vec3 trans_of(const Torsor& t) {
  return {t.translation(0).constant_term(), t.translation(1).constant_term(),
          t.translation(2).constant_term()};
}

Vec3 rot_of(const Torsor& t) {
  return {t.rotation(0).constant_term(), t.rotation(1).constant_term(),
          t.rotation(2).constant_term()};
}

}  // namespace

TEST(Torsor, TransportShiftsTranslationByMomentRule) {
  const Vec3 rot{0.001, -0.002, 0.0005};
  const Vec3 trans{0.01, 0.02, -0.03};
  const Torsor t = numeric_torsor(rot, trans, {1, 2, 3});
  const Vec3 target{11, -4, 3};
  const Torsor m = t.transport(target);
  const Vec3 expect = trans + cross(rot, target - Vec3{1, 2, 3});
  EXPECT_DOUBLE_EQ(trans_of(m).x, expect.x);
  EXPECT_DOUBLE_EQ(trans_of(m).y, expect.y);
  EXPECT_DOUBLE_EQ(trans_of(m).z, expect.z);
  EXPECT_DOUBLE_EQ(rot_of(m).x, rot.x);  // rotation part is a free vector
  EXPECT_DOUBLE_EQ(rot_of(m).y, rot.y);
  EXPECT_DOUBLE_EQ(rot_of(m).z, rot.z);
}

TEST(Torsor, TransportRoundTripIsExact) {
  // Dyadically representable values keep the float arithmetic lossless, so the
  // round trip must reproduce the torsor exactly, not just approximately.
  Torsor t({LinExpr::param(0, 0.25), LinExpr::param(1, -0.5), LinExpr::constant(0.125)},
           {LinExpr::param(2, 1.5), LinExpr::constant(-0.75), LinExpr::param(0, 2.0)},
           {2, -3, 5}, "global");
  t.radius() = LinExpr::param(3, 0.5);
  const Torsor back = t.transport({-7, 11, 13}).transport({2, -3, 5});
  for (int i = 0; i < 3; ++i) {
    EXPECT_TRUE(back.rotation(i).same_as(t.rotation(i)));
    EXPECT_TRUE(back.translation(i).same_as(t.translation(i)));
  }
  EXPECT_TRUE(back.radius().same_as(t.radius()));
  EXPECT_EQ(back.point().x, 2.0);
}

TEST(Torsor, RadiusIgnoresTransportAndBasis) {
  Torsor t = Torsor::zero({0, 0, 0}, "global");
  t.radius() = LinExpr::param(9, 1.0);
  const Torsor moved = t.transport({5, 5, 5});
  EXPECT_TRUE(moved.radius().same_as(t.radius()));
  const Mat3 rz90{{0, 1, 0}, {-1, 0, 0}, {0, 0, 1}};
  const Torsor mapped = t.with_components_mapped(rz90, "other");
  EXPECT_TRUE(mapped.radius().same_as(t.radius()));
}

TEST(Torsor, AddTransportsRightOperandToCommonPoint) {
  const Torsor a = numeric_torsor({0, 0, 0.001}, {0.1, 0, 0}, {0, 0, 0});
  const Torsor b = numeric_torsor({0, 0, 0}, {0, 0.2, 0}, {10, 0, 0});
  const Torsor s = a + b;
  EXPECT_EQ(s.point().x, 0.0);
  // b carries no rotation, so its translation is point-independent.
  EXPECT_DOUBLE_EQ(trans_of(s).x, 0.1);
  EXPECT_DOUBLE_EQ(trans_of(s).y, 0.2);
  const Torsor d = s - b;
  EXPECT_TRUE(d.translation(1).same_as(a.translation(1)));
}

TEST(Torsor, AddRejectsForeignFrames) {
  const Torsor a = numeric_torsor({0, 0, 0}, {0, 0, 0}, {0, 0, 0}, "global");
  const Torsor b = numeric_torsor({0, 0, 0}, {0, 0, 0}, {0, 0, 0}, "surface:3");
  EXPECT_THROW(a + b, FrameMismatch);
}

TEST(Torsor, ComponentMappingRotatesComponentVectors) {
  const Torsor t = numeric_torsor({0.001, 0.002, 0.003}, {1, 2, 3}, {4, 5, 6});
  const Mat3 rz90{{0, 1, 0}, {-1, 0, 0}, {0, 0, 1}};  // maps x->y, y->-x
  const Torsor m = t.with_components_mapped(rz90, "rotated");
  EXPECT_DOUBLE_EQ(rot_of(m).x, -0.002);
  EXPECT_DOUBLE_EQ(rot_of(m).y, 0.001);
  EXPECT_DOUBLE_EQ(rot_of(m).z, 0.003);
  EXPECT_DOUBLE_EQ(trans_of(m).x, -2.0);
  EXPECT_DOUBLE_EQ(trans_of(m).y, 1.0);
  EXPECT_EQ(m.frame(), "rotated");
  EXPECT_EQ(m.point().x, 4.0);  // mapping does not move the sample point
}

TEST(Torsor, DisplacementFieldFollowsMomentRule) {
  const Vec3 rot{0.002, 0, 0};
  const Torsor t = numeric_torsor(rot, {0, 0, 0}, {0, 0, 0});
  const Vec3 p{0, 10, 0};
  const auto u = t.displacement_at(p);
  const Vec3 expect = cross(rot, p);
  EXPECT_DOUBLE_EQ(u[0].constant_term(), expect.x);
  EXPECT_DOUBLE_EQ(u[1].constant_term(), expect.y);
  EXPECT_DOUBLE_EQ(u[2].constant_term(), expect.z);
}

TEST(Torsor, EvaluateProducesNumbers) {
  Torsor t = Torsor::zero({0, 0, 0}, "global");
  t.rotation(0) = LinExpr::param(0, 2.0);
  t.translation(2) = LinExpr::param(1) + LinExpr::constant(0.5);
  t.radius() = LinExpr::param(2, -1.0);
  const NumericTorsor n = t.evaluate({{0, 0.001}, {1, 0.25}, {2, 0.1}});
  EXPECT_DOUBLE_EQ(n.rotation.x, 0.002);
  EXPECT_DOUBLE_EQ(n.translation.z, 0.75);
  EXPECT_DOUBLE_EQ(n.radius, -0.1);
  EXPECT_THROW(t.evaluate({{0, 0.0}}), MissingParameter);
  EXPECT_DOUBLE_EQ(t.evaluate({{0, 0.0}}, true).translation.z, 0.5);
}

TEST(SurfaceTorsor, PlaneRegistersItsThreeKinds) {
  ParameterRegistry reg;
  const Torsor t = new_surface_torsor(plane_template(), 6, 0, ParamCategory::dm, reg);
  EXPECT_EQ(reg.size(), 3);
  const ParamId rx = reg.require("rx_6"), ry = reg.require("ry_6"), tz = reg.require("tz_6");
  EXPECT_DOUBLE_EQ(t.rotation(0).coefficient(rx), 1.0);
  EXPECT_DOUBLE_EQ(t.rotation(1).coefficient(ry), 1.0);
  EXPECT_DOUBLE_EQ(t.translation(2).coefficient(tz), 1.0);
  EXPECT_TRUE(t.rotation(2).is_constant());
  EXPECT_TRUE(t.translation(0).is_constant());
  EXPECT_TRUE(t.radius().is_constant());
  EXPECT_EQ(t.frame(), "surface:6");
}

TEST(SurfaceTorsor, CylinderRegistersFiveKindsIncludingRadius) {
  ParameterRegistry reg;
  const Torsor t = new_surface_torsor(cylinder_template(), 4, 3, ParamCategory::dh, reg);
  EXPECT_EQ(reg.size(), 5);
  EXPECT_DOUBLE_EQ(t.radius().coefficient(reg.require("ra_4S3")), 1.0);
  EXPECT_DOUBLE_EQ(t.translation(0).coefficient(reg.require("tx_4S3")), 1.0);
  EXPECT_DOUBLE_EQ(t.translation(1).coefficient(reg.require("ty_4S3")), 1.0);
  EXPECT_TRUE(t.translation(2).is_constant());  // axial slide is invariant
  EXPECT_TRUE(t.rotation(2).is_constant());     // spin is invariant
}

TEST(SurfaceTorsor, DuplicateRegistrationRefused) {
  ParameterRegistry reg;
  new_surface_torsor(plane_template(), 6, 0, ParamCategory::dm, reg);
  EXPECT_THROW(new_surface_torsor(plane_template(), 6, 0, ParamCategory::dm, reg),
               DuplicateParameter);
  EXPECT_THROW(new_surface_torsor(plane_template(), 7, 0, ParamCategory::lgp, reg), Error);
}
