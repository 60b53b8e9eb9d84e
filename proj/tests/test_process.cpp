#include <gtest/gtest.h>

#include "fixture.hpp"
#include "sdtol/process.hpp"

using namespace sdtol;
using testfix::block_part;
using testfix::bore_plan;
using testfix::three_plane_plan;

namespace {

bool has_code(const std::vector<ValidationIssue>& issues, const std::string& code) {
  for (const auto& i : issues)
    if (i.code == code) return true;
  return false;
}

}  // namespace

TEST(ScrewRow, RotationRowsReadTheAxisComponent) {
  Frame f{{5, -3, 2}, Mat3::identity()};
  const Vec6 rx = screw_row(Kind::rx, f);
  EXPECT_DOUBLE_EQ(rx[0], 1.0);
  EXPECT_DOUBLE_EQ(rx[1], 0.0);
  EXPECT_DOUBLE_EQ(rx[5], 0.0);  // origin never enters rotation rows
}

TEST(ScrewRow, TranslationRowsCarryTheMomentOfTheOrigin) {
  Frame f{{0, 10, 5}, Mat3{{0, -1, 0}, {0, 0, 1}, {-1, 0, 0}}};
  const Vec6 tz = screw_row(Kind::tz, f);
  // axis = (-1, 0, 0), origin x axis = (0, -5, 10)
  EXPECT_DOUBLE_EQ(tz[0], 0.0);
  EXPECT_DOUBLE_EQ(tz[1], -5.0);
  EXPECT_DOUBLE_EQ(tz[2], 10.0);
  EXPECT_DOUBLE_EQ(tz[3], -1.0);
  EXPECT_DOUBLE_EQ(tz[4], 0.0);
  EXPECT_DOUBLE_EQ(tz[5], 0.0);
  EXPECT_THROW(screw_row(Kind::ra, f), Error);
}

TEST(ScrewRow, ConstrainedKindsPerClass) {
  EXPECT_EQ(constrained_kinds(SurfaceClass::plane, false),
            (std::vector<Kind>{Kind::rx, Kind::ry, Kind::tz}));
  EXPECT_EQ(constrained_kinds(SurfaceClass::cylinder, false),
            (std::vector<Kind>{Kind::tx, Kind::ty}));
  EXPECT_EQ(constrained_kinds(SurfaceClass::cylinder, true),
            (std::vector<Kind>{Kind::rx, Kind::ry, Kind::tx, Kind::ty}));
}

TEST(DofAnalysis, ThreePlaneStackRanks321) {
  const ProcessPlan plan = three_plane_plan();
  const SetupDofAnalysis dof = analyze_setup_rows(plan.part, plan.setups[0]);
  EXPECT_EQ(dof.rank, 6);
  ASSERT_EQ(dof.new_dofs_per_connection.size(), 3u);
  EXPECT_EQ(dof.new_dofs_per_connection[0], 3);
  EXPECT_EQ(dof.new_dofs_per_connection[1], 2);
  EXPECT_EQ(dof.new_dofs_per_connection[2], 1);
  // Secondary plane: rx duplicates the primary's ry (both y-rotations).
  ASSERT_EQ(dof.entries.size(), 9u);
  EXPECT_EQ(dof.entries[3].kind, Kind::rx);
  EXPECT_FALSE(dof.entries[3].independent);
  EXPECT_TRUE(dof.entries[4].independent);   // ry -> yaw
  EXPECT_TRUE(dof.entries[5].independent);   // tz -> x stop
  // Tertiary plane only adds its normal translation.
  EXPECT_FALSE(dof.entries[6].independent);
  EXPECT_FALSE(dof.entries[7].independent);
  EXPECT_TRUE(dof.entries[8].independent);
}

TEST(DofAnalysis, BoreGrabsTranslationsPadKeepsYaw) {
  const ProcessPlan plan = bore_plan(0.05);
  const SetupDofAnalysis dof = analyze_setup_rows(plan.part, plan.setups[0]);
  EXPECT_EQ(dof.rank, 6);
  EXPECT_EQ(dof.new_dofs_per_connection[1], 2);  // bore: tx, ty
  EXPECT_EQ(dof.new_dofs_per_connection[2], 1);
  // The pad's surviving kind is the yaw rotation, not its normal translation.
  bool pad_ry = false, pad_tz = false;
  for (const auto& e : dof.entries) {
    if (e.connection_index == 2 && e.kind == Kind::ry) pad_ry = e.independent;
    if (e.connection_index == 2 && e.kind == Kind::tz) pad_tz = e.independent;
  }
  EXPECT_TRUE(pad_ry);
  EXPECT_FALSE(pad_tz);
}

TEST(Validation, AcceptsTheReferencePlans) {
  EXPECT_TRUE(validate_plan(three_plane_plan()).empty());
  EXPECT_TRUE(validate_plan(three_plane_plan(true)).empty());
  EXPECT_TRUE(validate_plan(bore_plan(0.05)).empty());
}

TEST(Validation, SurfaceMachinedTwiceIsRejected) {
  ProcessPlan plan = three_plane_plan();
  sdtol::SetUp su2 = plan.setups[0];
  su2.id = 2;
  su2.connections[0].part_surface = 1;
  plan.setups.push_back(su2);  // machines surface 4 again
  EXPECT_TRUE(has_code(validate_plan(plan), "machining.duplicate"));
}

TEST(Validation, PositioningNeedsAnExistingSurface) {
  ProcessPlan plan = three_plane_plan();
  plan.raw.pop_back();  // surface 3 no longer raw and never machined before use
  EXPECT_TRUE(has_code(validate_plan(plan), "connection.precedence"));
}

TEST(Validation, RanksMustBeContiguous) {
  ProcessPlan plan = three_plane_plan();
  plan.setups[0].connections[2].rank = 4;
  EXPECT_TRUE(has_code(validate_plan(plan), "connection.ranks"));
}

TEST(Validation, UnknownSurfaceReferences) {
  ProcessPlan plan = three_plane_plan();
  plan.setups[0].machining.push_back({77, {}});
  plan.raw.push_back({78, {}});
  auto issues = validate_plan(plan);
  EXPECT_TRUE(has_code(issues, "machining.unknown_surface"));
  EXPECT_TRUE(has_code(issues, "raw.unknown_surface"));
}

TEST(Validation, UnderAndOverConstrainedStacks) {
  ProcessPlan plan = three_plane_plan();
  plan.setups[0].connections.pop_back();
  plan.setups[0].connections[1].rank = 2;
  auto issues = validate_plan(plan);
  EXPECT_TRUE(has_code(issues, "positioning.underconstrained"));

  ProcessPlan over = three_plane_plan();
  // A second connection on a parallel face adds nothing new.
  over.part.surfaces.emplace(
      5, testfix::plane_surface(5, {10, 10, 10}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                {{-10, -10, 0}, {10, -10, 0}, {10, 10, 0}, {-10, 10, 0}}));
  over.raw.push_back({5, {}});
  over.setups[0].machining.clear();
  ElementaryConnection c5;
  c5.part_surface = 5;
  c5.rank = 4;
  over.setups[0].connections.push_back(c5);
  EXPECT_TRUE(has_code(validate_plan(over), "positioning.overconstrained"));
}

TEST(Validation, FloatingCylinderNeedsClearance) {
  ProcessPlan plan = bore_plan(0.0);
  EXPECT_TRUE(has_code(validate_plan(plan), "connection.clearance"));
}

TEST(Validation, HolderBoundsMustNameFreeKinds) {
  ProcessPlan plan = three_plane_plan();
  plan.setups[0].connections[0].holder_bounds[Kind::rz] = {-1e-4, 1e-4};
  EXPECT_TRUE(has_code(validate_plan(plan), "connection.bad_bound_kind"));
}

TEST(Validation, MachinedSurfaceCannotAlsoPosition) {
  ProcessPlan plan = three_plane_plan();
  plan.setups[0].machining.push_back({2, {}});  // surface 2 also positions
  EXPECT_TRUE(has_code(validate_plan(plan), "machining.positioning_overlap"));
}

TEST(Registry, CanonicalOrderAndBoxes) {
  ProcessPlan plan = three_plane_plan(true);
  plan.raw[0].bounds[Kind::rx] = {-2e-4, 2e-4};
  plan.setups[0].connections[0].holder_bounds[Kind::tz] = {-5e-3, 5e-3};
  plan.setups[0].machining[0].bounds[Kind::tz] = {-1e-2, 1e-2};
  const ParameterRegistry reg = registry_of(plan);

  // Raw surfaces first (ascending), then holder + link params per connection in
  // rank order, then the machined surfaces of the set-up.
  EXPECT_EQ(reg.at(0).name, "rx_1");
  EXPECT_EQ(reg.at(1).name, "ry_1");
  EXPECT_EQ(reg.at(2).name, "tz_1");
  EXPECT_EQ(reg.at(3).name, "rx_2");
  EXPECT_EQ(reg.at(9).name, "rx_1S1");
  EXPECT_EQ(reg.size(), 23);

  const auto& rx1 = reg.at(reg.require("rx_1"));
  ASSERT_TRUE(rx1.bounds.has_value());
  EXPECT_DOUBLE_EQ(rx1.bounds->upper, 2e-4);
  EXPECT_TRUE(reg.at(reg.require("tz_1S1")).bounds.has_value());
  EXPECT_TRUE(reg.at(reg.require("tz_4")).bounds.has_value());
  EXPECT_FALSE(reg.at(reg.require("ry_2")).bounds.has_value());

  // The floating secondary plane owns link parameters for its surviving kinds.
  EXPECT_EQ(reg.at(reg.require("lry_2S1")).category, ParamCategory::lhp);
  EXPECT_EQ(reg.at(reg.require("ltz_2S1")).category, ParamCategory::lhp);
  EXPECT_FALSE(reg.find("lrx_2S1").has_value());  // absorbed kind, no link

  // All stored categories parse back from their names.
  for (const auto& p : reg.all()) {
    auto parsed = parse_param_name(p.name);
    ASSERT_TRUE(parsed.has_value()) << p.name;
    EXPECT_EQ(parsed->category, p.category) << p.name;
    EXPECT_EQ(parsed->kind, p.kind) << p.name;
  }
}

TEST(Registry, BoreLinkParamsFollowIndependence) {
  const ParameterRegistry reg = registry_of(bore_plan(0.05));
  EXPECT_TRUE(reg.find("ltx_8S1").has_value());
  EXPECT_TRUE(reg.find("lty_8S1").has_value());
  EXPECT_FALSE(reg.find("lrx_8S1").has_value());  // short fit: no tilt links
  EXPECT_TRUE(reg.find("ra_8S1").has_value());    // pin radius deviation
  EXPECT_EQ(reg.size(), 27);
}

TEST(Constraints, NamedRowsResolveAgainstRegistry) {
  const ProcessPlan plan = three_plane_plan();
  const ParameterRegistry reg = registry_of(plan);
  NamedConstraint nc;
  nc.coefficients = {{"rx_1", 2.0}, {"tz_4", -1.0}};
  nc.sense = Sense::ge;
  nc.bound = -0.25;
  nc.tag = ConstraintTag::cm;
  nc.label = "tool_budget";
  const LinearConstraint lc = resolve_constraint(nc, reg);
  EXPECT_DOUBLE_EQ(lc.expr.coefficient(reg.require("rx_1")), 2.0);
  EXPECT_DOUBLE_EQ(lc.expr.coefficient(reg.require("tz_4")), -1.0);
  EXPECT_EQ(lc.sense, Sense::ge);
  EXPECT_EQ(lc.label, "tool_budget");

  NamedConstraint bad;
  bad.coefficients = {{"nope_1", 1.0}};
  EXPECT_THROW(resolve_constraint(bad, reg), MissingParameter);
}
