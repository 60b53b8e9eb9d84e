// Specification synthesis: influence tables, surface classification, proposal
// rules, released-machining verification, uniform sizing, and redundancy.

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fixture.hpp"
#include "sdtol/synthesis.hpp"

using namespace sdtol;
using testfix::pad_functional;
using testfix::pad_plan;
using testfix::wedge_functional;
using testfix::wedge_plan;

namespace {

struct WedgeAnalysis {
  ProcessPlan plan = wedge_plan();
  ParameterRegistry reg;
  MMP mmp;
  AnalysisProblem problem;
  WorstCaseResult worst;
  InfluenceTable table;

  WedgeAnalysis() {
    reg = registry_of(plan);
    mmp = build_mmp(plan, reg);
    problem = build_analysis_problem(mmp, plan.part, wedge_functional(), reg);
    worst = worst_case(problem.problem, SolverOptions{});
    table = influence_table(influence_coefficients(problem.problem, worst), reg);
  }
};

const WedgeAnalysis& wedge_analysis() {
  static WedgeAnalysis a;
  return a;
}

std::vector<ManufacturingSpec> wedge_proposed_specs(double width) {
  const auto proposals = propose_specs(classify_parameters(wedge_analysis().table,
                                                           wedge_analysis().plan));
  std::vector<ManufacturingSpec> specs;
  for (const SpecProposal& p : proposals) {
    specs.push_back(p.spec);
    specs.back().zone.width = width;
  }
  return specs;
}

// The proposals referenced to |2|10| leave set-up 1's gauges free to slide
// along y (stop 9 is filtered out as non-influential). A planner closes that
// loop by completing the datum frame with the remaining positioning surface.
std::vector<ManufacturingSpec> wedge_specs(double width) {
  std::vector<ManufacturingSpec> specs = wedge_proposed_specs(width);
  for (ManufacturingSpec& s : specs)
    if (s.setup == 1) s.datums.push_back(9);
  return specs;
}

}  // namespace

TEST(Classification, TranslationKindsIncludeRadiusDeviation) {
  EXPECT_TRUE(translation_kind(Kind::tx));
  EXPECT_TRUE(translation_kind(Kind::ty));
  EXPECT_TRUE(translation_kind(Kind::tz));
  EXPECT_TRUE(translation_kind(Kind::ra));
  EXPECT_FALSE(translation_kind(Kind::rx));
  EXPECT_FALSE(translation_kind(Kind::ry));
  EXPECT_FALSE(translation_kind(Kind::rz));
}

TEST(InfluenceTableRows, RolesComeFromNamesAndSmallCellsBlank) {
  ParameterRegistry reg;
  const ParamId dm = reg.add({-1, "tz_6", Kind::tz, 6, 3, ParamCategory::dm, std::nullopt});
  const ParamId dh = reg.add({-1, "rx_3S3", Kind::rx, 3, 3, ParamCategory::dh, std::nullopt});
  const ParamId lhp = reg.add({-1, "lty_4S3", Kind::ty, 4, 3, ParamCategory::lhp, std::nullopt});
  const ParamId lgp = reg.add({-1, "lgtz_G", Kind::tz, -1, 0, ParamCategory::lgp, std::nullopt});

  std::map<ParamId, double> g{{dm, -1.0}, {dh, 30.0}, {lhp, 5e-10}, {lgp, 2.0}};
  const InfluenceTable t = influence_table(g, reg);

  ASSERT_EQ(t.rows.size(), 3u);  // gauge links never appear
  EXPECT_EQ(t.rows[0].parameter, "tz_6");
  EXPECT_EQ(t.rows[0].role, SurfaceRole::machined);
  EXPECT_DOUBLE_EQ(t.rows[0].coefficient, 1.0);  // magnitude of the gradient
  EXPECT_TRUE(t.rows[0].influential);
  EXPECT_EQ(t.rows[1].role, SurfaceRole::positioning);
  EXPECT_EQ(t.rows[1].setup, 3);
  EXPECT_EQ(t.rows[2].parameter, "lty_4S3");
  EXPECT_EQ(t.rows[2].role, SurfaceRole::positioning);
  EXPECT_FALSE(t.rows[2].influential);
  EXPECT_EQ(t.rows[2].coefficient, 0.0);  // below threshold: blank cell
}

// The wedge's expected synthesis, end to end from the influence table:
//  - set-up 1 machines the inclined face and the hole; both matter in
//    translation, so each gets a location spec. Stop 9 only locates the part
//    along y, which the z-reading pocket requirement never sees, so the datum
//    frame keeps just |2|10|;
//  - set-up 2's refaced end only matters through its tilt, and of its
//    positioning surfaces only face 10 steers anything the pocket can see,
//    so plane 5 gets an orientation spec on |10|;
//  - set-up 3 machines the pocket floor: location spec on |3|4|5|;
//  - set-up 4 machines a surface nothing downstream reads: no spec.
TEST(Synthesis, WedgeProposalsFollowTheRules) {
  const WedgeAnalysis& a = wedge_analysis();
  ASSERT_EQ(a.worst.status, WorstCaseStatus::optimal);

  const auto cls = classify_parameters(a.table, a.plan);
  ASSERT_EQ(cls.size(), 3u);  // set-up 4 never appears

  EXPECT_EQ(cls[2].setup, 3);
  ASSERT_EQ(cls[2].positioning.size(), 3u);
  EXPECT_EQ(cls[2].positioning[0].surface, 3);
  EXPECT_EQ(cls[2].positioning[1].surface, 4);
  EXPECT_EQ(cls[2].positioning[2].surface, 5);
  ASSERT_EQ(cls[2].machined.size(), 1u);
  EXPECT_EQ(cls[2].machined[0].surface, 6);
  EXPECT_TRUE(cls[2].machined[0].translation);
  EXPECT_TRUE(cls[2].machined[0].rotation);

  const auto proposals = propose_specs(cls);
  ASSERT_EQ(proposals.size(), 4u);

  EXPECT_EQ(proposals[0].spec.setup, 1);
  EXPECT_EQ(proposals[0].spec.surface, 3);
  EXPECT_EQ(proposals[0].spec.datums, (std::vector<int>{2, 10}));
  EXPECT_EQ(proposals[0].spec.zone.type, ZoneSpec::Type::location);

  EXPECT_EQ(proposals[1].spec.setup, 1);
  EXPECT_EQ(proposals[1].spec.surface, 4);
  EXPECT_EQ(proposals[1].spec.datums, (std::vector<int>{2, 10}));
  EXPECT_EQ(proposals[1].spec.zone.type, ZoneSpec::Type::location);

  EXPECT_EQ(proposals[2].spec.setup, 2);
  EXPECT_EQ(proposals[2].spec.surface, 5);
  EXPECT_EQ(proposals[2].spec.datums, (std::vector<int>{10}));
  EXPECT_EQ(proposals[2].spec.zone.type, ZoneSpec::Type::orientation);

  EXPECT_EQ(proposals[3].spec.setup, 3);
  EXPECT_EQ(proposals[3].spec.surface, 6);
  EXPECT_EQ(proposals[3].spec.datums, (std::vector<int>{3, 4, 5}));
  EXPECT_EQ(proposals[3].spec.zone.type, ZoneSpec::Type::location);

  for (const SpecProposal& p : proposals) {
    EXPECT_TRUE(p.notes.empty());
    for (int d : p.spec.datums) EXPECT_NE(d, p.spec.surface);
  }
}

// Each set-up 1 gauge referenced to |2|10| may slide along y independently, so
// correlated deviations of faces 3 and 4 pass both inspections while set-up 3
// re-seats on the drifted features and the pocket runs away in z. Verification
// catches the blind direction regardless of the spec widths.
TEST(Synthesis, ProposalsAloneLeaveAnUnreferencedSlide) {
  const VerificationOutcome v = verify_specs(wedge_analysis().plan, wedge_functional(),
                                             wedge_proposed_specs(0.1), SolverOptions{});
  EXPECT_FALSE(v.complete);
  ASSERT_EQ(v.result.status, WorstCaseStatus::divergent);

  const ParameterRegistry reg = registry_of(wedge_analysis().plan);
  EXPECT_TRUE(v.result.divergence_ray.count(reg.require("tz_3")));
  EXPECT_TRUE(v.result.divergence_ray.count(reg.require("ty_4")));
}

TEST(Synthesis, WedgeVerificationCompletesOnceTheSlideIsReferenced) {
  const VerificationOutcome v =
      verify_specs(wedge_analysis().plan, wedge_functional(), wedge_specs(0.1), SolverOptions{});
  EXPECT_TRUE(v.complete);
  EXPECT_EQ(v.result.status, WorstCaseStatus::optimal);
  EXPECT_LT(v.result.value, 0.3);
}

TEST(Synthesis, DroppingThePocketSpecDiverges) {
  std::vector<ManufacturingSpec> specs = wedge_specs(0.1);
  specs.erase(specs.begin() + 3);  // the location spec on plane 6
  const VerificationOutcome v =
      verify_specs(wedge_analysis().plan, wedge_functional(), specs, SolverOptions{});
  EXPECT_FALSE(v.complete);
  EXPECT_EQ(v.result.status, WorstCaseStatus::divergent);

  // The runaway direction involves the now-unbounded pocket offset. Process
  // parameter ids are stable across rebuilds of the same plan.
  const ParameterRegistry reg = registry_of(wedge_analysis().plan);
  EXPECT_TRUE(v.result.divergence_ray.count(reg.require("tz_6")));
}

TEST(Sizing, OneParameterStackSizesToTheFunctionalWidth) {
  const ProcessPlan plan = pad_plan();
  ManufacturingSpec spec;
  spec.setup = 1;
  spec.surface = 11;
  spec.datums = {1, 2, 3};
  spec.zone = {ZoneSpec::Type::location, 0};

  const SizingResult r = size_tolerances(plan, pad_functional(0.6), {spec}, SolverOptions{});
  ASSERT_EQ(r.sized.size(), 1u);
  EXPECT_NEAR(r.sized[0].zone.width, 0.6, 1e-6);
  EXPECT_GE(r.worst_value, -1e-6);
  EXPECT_LE(r.worst_value, 1e-3);

  // Doubling the functional width doubles the sized value: everything scales.
  const SizingResult r2 = size_tolerances(plan, pad_functional(1.2), {spec}, SolverOptions{});
  EXPECT_NEAR(r2.sized[0].zone.width, 1.2, 2e-6);
}

TEST(Sizing, RespectsRelativeWeightsBetweenSpecs) {
  const ProcessPlan plan = pad_plan(true);
  ManufacturingSpec s11;
  s11.setup = 1;
  s11.surface = 11;
  s11.datums = {1, 2, 3};
  s11.zone = {ZoneSpec::Type::location, 3.0};
  ManufacturingSpec s12 = s11;
  s12.surface = 12;
  s12.zone.width = 1.0;

  const SizingResult r = size_tolerances(plan, pad_functional(0.6), {s11, s12}, SolverOptions{});
  // Pad 12 never reaches the functional gauge, so only the first width binds.
  EXPECT_NEAR(r.sized[0].zone.width, 0.6, 1e-6);
  EXPECT_NEAR(r.sized[1].zone.width / r.sized[0].zone.width, 1.0 / 3.0, 1e-9);
}

TEST(Sizing, UnreachableFunctionalToleranceIsAnError) {
  // The requirement measures the pad from the raw top face, whose own offset
  // box already exceeds the functional zone. Raw deviations are never released
  // by a spec, so no width -- however small -- makes the worst case conform.
  const ProcessPlan plan = pad_plan(false, 0.5);
  VirtualGauge functional;
  functional.datums = {4};
  functional.toleranced = 11;
  functional.zone = {ZoneSpec::Type::location, 0.6};
  functional.tag = "G";

  ManufacturingSpec spec;
  spec.setup = 1;
  spec.surface = 11;
  spec.datums = {1, 2, 3};
  spec.zone = {ZoneSpec::Type::location, 1.0};
  EXPECT_THROW(size_tolerances(plan, functional, {spec}, SolverOptions{}), Error);
}

TEST(Redundancy, SpecOnUninvolvedSurfaceIsFlagged) {
  const ProcessPlan plan = pad_plan(true);
  ManufacturingSpec s11;
  s11.setup = 1;
  s11.surface = 11;
  s11.datums = {1, 2, 3};
  s11.zone = {ZoneSpec::Type::location, 0.3};
  ManufacturingSpec s12 = s11;
  s12.surface = 12;

  const std::vector<ManufacturingSpec> specs{s11, s12};
  const VerificationOutcome baseline =
      verify_specs(plan, pad_functional(0.6), specs, SolverOptions{});
  ASSERT_TRUE(baseline.complete);

  const auto flags = detect_redundant(plan, pad_functional(0.6), specs, SolverOptions{}, baseline);
  ASSERT_EQ(flags.size(), 2u);
  EXPECT_FALSE(flags[0].unnecessary);  // removing it releases pad 11 entirely
  EXPECT_TRUE(flags[0].divergent_without);
  EXPECT_TRUE(flags[1].unnecessary);
  EXPECT_FALSE(flags[1].divergent_without);
  EXPECT_NEAR(flags[1].value_without, baseline.result.value, 1e-9);
}

TEST(Redundancy, WedgeSpecOnFinalSetupSurfaceIsUnnecessary) {
  std::vector<ManufacturingSpec> specs = wedge_specs(0.1);
  ManufacturingSpec extra;
  extra.setup = 4;
  extra.surface = 7;
  extra.datums = {6, 4, 5};
  extra.zone = {ZoneSpec::Type::location, 0.1};
  specs.push_back(extra);

  const VerificationOutcome baseline =
      verify_specs(wedge_analysis().plan, wedge_functional(), specs, SolverOptions{});
  ASSERT_TRUE(baseline.complete);

  const auto flags =
      detect_redundant(wedge_analysis().plan, wedge_functional(), specs, SolverOptions{},
                       baseline);
  ASSERT_EQ(flags.size(), 5u);
  EXPECT_TRUE(flags[4].unnecessary);
  for (size_t i = 0; i + 1 < flags.size(); ++i)
    EXPECT_FALSE(flags[i].unnecessary) << "spec " << i;
}
