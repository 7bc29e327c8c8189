// psd: partial stochastic dominance from the command line.
//
//   psd tau X Y        tau with primal and dual certificates
//   psd measures X Y   tau, q, r and alpha side by side (one-dimensional)
//   psd test X Y       estimate, confidence interval and dominance test
//   psd axioms         axiom suite on random instances and counterexamples
//   psd verify R X Y   re-check the certificates in report R
//
// Reports go to stdout as JSON; a short summary goes to stderr.

#include "CLI11.hpp"
#include "psd/cli/commands.hpp"

#include <fstream>
#include <iostream>

namespace {

using namespace psd::cli;

struct Flags {
  std::string order = "auto";
  bool exact = false;
  bool floating = false;
  std::vector<std::string> domain;
  std::string input_kind;
  std::string ci = "bootstrap";
  bool no_test = false;
};

void add_comparison_flags(CLI::App* cmd, ComparisonSpec& spec, Flags& flags, bool positional_inputs = true) {
  if (positional_inputs) {
    cmd->add_option("x", spec.input_x, "Sample or atoms file for mu (the dominated side)")->required();
    cmd->add_option("y", spec.input_y, "Sample or atoms file for nu")->required();
  }
  cmd->add_option("--order", flags.order, "Partial order: auto, total, product or relation")
      ->check(CLI::IsMember({"auto", "total", "product", "relation"}));
  cmd->add_option("--relation", spec.relation_path, "Relation file (implies --order relation)");
  auto* exact = cmd->add_flag("--exact", flags.exact, "Exact rational arithmetic (default)");
  auto* floating = cmd->add_flag("--float", flags.floating, "Floating-point arithmetic, tolerance 1e-12");
  exact->excludes(floating);
  cmd->add_option("--input-kind", flags.input_kind, "samples-csv or atoms-json (default: by extension)")
      ->check(CLI::IsMember({"samples-csv", "atoms-json"}));
  cmd->add_option("--grid-n", spec.grid_n, "Number of pooled-quantile grid points for q");
  cmd->add_option("--domain", flags.domain, "Domain [a, b] for r")->expected(2);
  cmd->add_option("--level", spec.stats.level, "Confidence level");
  cmd->add_option("--bootstrap", spec.stats.resamples, "Bootstrap resamples");
  cmd->add_option("--seed", spec.stats.seed, "Random seed");
  cmd->add_option("--ci", flags.ci, "Interval method: bootstrap or dkw")->check(CLI::IsMember({"bootstrap", "dkw"}));
  cmd->add_option("--permutations", spec.stats.permutations, "Use a permutation test with N permutations");
  cmd->add_flag("--no-test", flags.no_test, "Skip the dominance test");
  cmd->add_flag("--emit-cdf-table", spec.emit_cdf_table, "Include F, G and G - F on the merged grid");
}

void finish_spec(ComparisonSpec& spec, const Flags& flags) {
  if (flags.floating) spec.arithmetic = psd::ArithmeticMode::floating();
  if (flags.order == "total") spec.order_kind = OrderKind::total;
  if (flags.order == "product") spec.order_kind = OrderKind::product;
  if (flags.order == "relation" || !spec.relation_path.empty()) spec.order_kind = OrderKind::relation_file;
  if (flags.domain.size() == 2) spec.domain = std::make_pair(flags.domain[0], flags.domain[1]);
  if (flags.input_kind == "samples-csv") spec.input_kind = InputKind::samples_csv;
  if (flags.input_kind == "atoms-json") spec.input_kind = InputKind::atoms_json;
  spec.stats.ci_method = flags.ci == "dkw" ? psd::CiMethod::dkw : psd::CiMethod::bootstrap;
  spec.stats.run_test = !flags.no_test;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial stochastic dominance via optimal transport"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "Suppress the summary on stderr");
  app.set_version_flag("--version", kVersion);

  ComparisonSpec spec;
  Flags flags;
  auto* tau = app.add_subcommand("tau", "Compute tau with certificates");
  auto* measures = app.add_subcommand("measures", "Compute tau, q, r and alpha");
  auto* test = app.add_subcommand("test", "Estimate tau and test for dominance from samples");
  for (auto* cmd : {tau, measures, test}) {
    add_comparison_flags(cmd, spec, flags);
    cmd->add_flag("--quiet", quiet, "Suppress the summary on stderr");
  }

  std::uint64_t axiom_seed = 20240101;
  std::size_t suite_size = 100;
  bool axiom_float = false;
  auto* axioms = app.add_subcommand("axioms", "Run the axiom suite");
  axioms->add_option("--seed", axiom_seed, "Seed of the random suite");
  axioms->add_option("--suite-size", suite_size, "Random instances per check");
  axioms->add_flag("--float", axiom_float, "Floating-point arithmetic");
  axioms->add_flag("--quiet", quiet, "Suppress the summary on stderr");

  std::string report_path;
  auto* verify = app.add_subcommand("verify", "Re-check the certificates of a tau or measures report");
  verify->add_option("report", report_path, "Report JSON file")->required();
  add_comparison_flags(verify, spec, flags);
  verify->add_flag("--quiet", quiet, "Suppress the summary on stderr");

  CLI11_PARSE(app, argc, argv);
  finish_spec(spec, flags);

  try {
    CommandOutput out;
    if (*tau) {
      out = cmd_tau(spec);
    } else if (*measures) {
      out = cmd_measures(spec);
    } else if (*test) {
      out = cmd_test(spec);
    } else if (*axioms) {
      out = cmd_axioms(axiom_seed, suite_size,
                       axiom_float ? psd::ArithmeticMode::floating() : psd::ArithmeticMode::exact());
    } else {
      std::ifstream in(report_path);
      if (!in) throw CommandError(exit_code::parse_error, "cannot open " + report_path);
      nlohmann::json report;
      try {
        in >> report;
      } catch (const nlohmann::json::parse_error& e) {
        throw CommandError(exit_code::parse_error, report_path + ": " + e.what());
      }
      out = cmd_verify(report, spec);
    }
    std::cout << out.report.dump(2) << "\n";
    if (!quiet) std::cerr << out.summary;
    return out.exit_code;
  } catch (const CommandError& e) {
    std::cerr << "psd: " << e.what() << "\n";
    return e.code();
  }
}
