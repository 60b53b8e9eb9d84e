// Command-line front end: analyze a process plan against its functional
// requirement, print influence tables, synthesize / verify / size / audit
// manufacturing specifications.
//
// Exit codes: 0 = conform / complete, 1 = non-conform / incomplete / diverging,
// 2 = usage or input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sdtol.hpp"

namespace {

using namespace sdtol;

struct CliOptions {
  std::string plan_path;
  unsigned seed = 1;
  std::string solver = "iterative";
  int starts = 16;
  std::string format = "text";
  std::string out_path;
};

bool log_enabled() {
  const char* v = std::getenv("SDTOL_LOG");
  return v && std::string(v) != "" && std::string(v) != "off";
}

void log_line(const std::string& msg) {
  if (log_enabled()) std::cerr << "sdtol: " << msg << "\n";
}

SolverOptions solver_options(const CliOptions& cli) {
  SolverOptions opt;
  opt.mode = cli.solver == "enumerate" ? SolverOptions::Mode::enumerate
                                       : SolverOptions::Mode::iterative;
  opt.starts = cli.starts;
  opt.seed = cli.seed;
  return opt;
}

Report base_report(const std::string& command, const CliOptions& cli) {
  Report r;
  r.run.command = command;
  r.run.plan_source = cli.plan_path;
  r.run.solver = cli.solver;
  r.run.starts = cli.starts;
  r.run.seed = cli.seed;
  r.tolerances = reported_tolerances();
  return r;
}

void emit(const Report& r, const CliOptions& cli) {
  const std::string text =
      cli.format == "json" ? to_json(r).dump(2) + "\n" : render_text(r);
  if (cli.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cli.out_path, std::ios::binary);
    if (!out) throw Error("cannot write " + cli.out_path);
    out << text;
  }
}

// Specs are mandatory for verify / size / redundancy; requiring them up front
// turns an empty section into a located input error instead of a solver one.
std::vector<ManufacturingSpec> require_specs(const PlanDocument& doc) {
  if (doc.specs.empty())
    throw DocumentError({{IssueKind::schema, "manufacturing_specs",
                          "this command needs at least one manufacturing specification"}});
  return doc.specs;
}

struct AnalysisRun {
  ParameterRegistry reg;
  AnalysisProblem built;
  WorstCaseResult worst;
};

AnalysisRun run_analysis(const PlanDocument& doc, const SolverOptions& opt) {
  AnalysisRun a;
  a.reg = registry_of(doc.plan);
  const MMP mmp = build_mmp(doc.plan, a.reg);
  a.built = build_analysis_problem(mmp, doc.plan.part, doc.functional, a.reg,
                                   doc.plan.sampling);
  a.worst = worst_case(a.built.problem, opt);
  log_line("analysis status " + std::string(worst_case_status_name(a.worst.status)));
  return a;
}

int cmd_analyze(const PlanDocument& doc, const CliOptions& cli, bool with_influence) {
  Report r = base_report(with_influence ? "influence" : "analyze", cli);
  const AnalysisRun a = run_analysis(doc, solver_options(cli));
  const bool conform = a.worst.status == WorstCaseStatus::optimal && a.worst.value >= 0;
  r.analysis = describe_solve(a.worst, a.reg, conform);
  if (with_influence)
    r.influence = influence_table(influence_coefficients(a.built.problem, a.worst), a.reg);
  emit(r, cli);
  return conform ? 0 : 1;
}

int cmd_synthesize(const PlanDocument& doc, const CliOptions& cli) {
  Report r = base_report("synthesize", cli);
  const AnalysisRun a = run_analysis(doc, solver_options(cli));
  const bool conform = a.worst.status == WorstCaseStatus::optimal && a.worst.value >= 0;
  r.analysis = describe_solve(a.worst, a.reg, conform);
  const InfluenceTable table =
      influence_table(influence_coefficients(a.built.problem, a.worst), a.reg);
  r.influence = table;
  r.proposals = propose_specs(classify_parameters(table, doc.plan));
  emit(r, cli);
  return conform ? 0 : 1;
}

int cmd_verify(const PlanDocument& doc, const CliOptions& cli) {
  Report r = base_report("verify", cli);
  const std::vector<ManufacturingSpec> specs = require_specs(doc);
  const VerificationOutcome v = verify_specs(doc.plan, doc.functional, specs, solver_options(cli));
  r.verification = describe_solve(v.result, v.registry, v.conform);
  r.verification->complete = v.complete;
  emit(r, cli);
  return v.conform ? 0 : 1;
}

int cmd_size(const PlanDocument& doc, const CliOptions& cli) {
  Report r = base_report("size", cli);
  const std::vector<ManufacturingSpec> specs = require_specs(doc);
  const SizingResult s = size_tolerances(doc.plan, doc.functional, specs, solver_options(cli));
  r.sizing = s;
  const VerificationOutcome v =
      verify_specs(doc.plan, doc.functional, s.sized, solver_options(cli));
  r.verification = describe_solve(v.result, v.registry, v.conform);
  r.verification->complete = v.complete;
  emit(r, cli);
  return v.conform ? 0 : 1;
}

int cmd_redundancy(const PlanDocument& doc, const CliOptions& cli) {
  Report r = base_report("redundancy", cli);
  const std::vector<ManufacturingSpec> specs = require_specs(doc);
  const SolverOptions opt = solver_options(cli);
  const VerificationOutcome baseline = verify_specs(doc.plan, doc.functional, specs, opt);
  r.verification = describe_solve(baseline.result, baseline.registry, baseline.conform);
  r.verification->complete = baseline.complete;
  const std::vector<RedundancyFlag> flags =
      detect_redundant(doc.plan, doc.functional, specs, opt, baseline);
  std::vector<RedundancyReport> rows;
  for (size_t i = 0; i < specs.size(); ++i)
    rows.push_back({specs[i].setup, specs[i].surface, flags[i].unnecessary,
                    flags[i].value_without, flags[i].divergent_without});
  r.redundancy = std::move(rows);
  emit(r, cli);
  return baseline.conform ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"worst-case tolerance analysis and synthesis for machining process plans"};
  app.require_subcommand(1);

  CliOptions cli;
  std::string command;
  for (const auto& [name, help] :
       {std::pair<const char*, const char*>{"analyze", "worst-case functional slack"},
        {"influence", "analysis plus the defect-influence table"},
        {"synthesize", "propose manufacturing specifications (widths left to size)"},
        {"verify", "check the manufacturing specifications against the requirement"},
        {"size", "scale the specification widths to the largest conforming values"},
        {"redundancy", "flag specifications whose removal changes nothing"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("plan", cli.plan_path, "plan document (JSON)")->required();
    sub->add_option("--seed", cli.seed, "random-start seed");
    sub->add_option("--solver", cli.solver, "worst-case solver")
        ->check(CLI::IsMember({"enumerate", "iterative"}));
    sub->add_option("--starts", cli.starts, "iterative solver restarts")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", cli.format, "report format")
        ->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--out", cli.out_path, "write the report to a file");
    sub->callback([&command, name = std::string(name)] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0; any parse problem is a usage error
  }

  try {
    const PlanDocument doc = load_plan_file(cli.plan_path);
    if (command == "analyze") return cmd_analyze(doc, cli, false);
    if (command == "influence") return cmd_analyze(doc, cli, true);
    if (command == "synthesize") return cmd_synthesize(doc, cli);
    if (command == "verify") return cmd_verify(doc, cli);
    if (command == "size") return cmd_size(doc, cli);
    if (command == "redundancy") return cmd_redundancy(doc, cli);
    std::cerr << "sdtol: unknown command\n";
    return 2;
  } catch (const DocumentError& e) {
    for (const DocumentIssue& i : e.issues)
      std::cerr << "sdtol: " << issue_kind_name(i.kind) << " error at " << i.where << ": "
                << i.message << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "sdtol: " << e.what() << "\n";
    return 1;
  }
}
