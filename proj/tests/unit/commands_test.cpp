#include "psd/cli/commands.hpp"
#include "psd/serialize.hpp"
#include "test_util.hpp"

#include <filesystem>

namespace psd::cli {
namespace {

double num(const nlohmann::json& j) { return scalar_from_json<double>(j); }

std::string data(const std::string& name) { return std::string(PSD_TEST_DATA_DIR) + "/" + name; }

ComparisonSpec spec_for(const std::string& x, const std::string& y) {
  ComparisonSpec s;
  s.input_x = data(x);
  s.input_y = data(y);
  return s;
}

int code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const CommandError& e) {
    return e.code();
  }
  return exit_code::ok;
}

TEST(CmdTau, TwoAtomExact) {
  const auto out = cmd_tau(spec_for("two_atom_x.json", "two_atom_y.json"));
  EXPECT_EQ(out.exit_code, exit_code::ok);
  EXPECT_EQ(out.report["tau"], "1/4");
  EXPECT_EQ(out.report["order"], "total");
  EXPECT_TRUE(out.report["certificates"]["verified"].get<bool>());
  EXPECT_EQ(out.report["certificates"]["dual_gap"], "3/4");
  EXPECT_EQ(out.report["provenance"]["arithmetic"], "exact-rational");
  EXPECT_EQ(out.report["provenance"]["inputs"]["x"]["sha256"].get<std::string>().size(), 64u);
}

TEST(CmdTau, Identical) {
  EXPECT_EQ(cmd_tau(spec_for("two_atom_x.json", "two_atom_x.json")).report["tau"], "1");
}

TEST(CmdTau, ProductOrderSquare) {
  const auto out = cmd_tau(spec_for("square_x.json", "square_y.json"));
  EXPECT_EQ(out.report["tau"], "1/2");
  EXPECT_EQ(out.report["order"], "product");
  EXPECT_EQ(out.report["certificates"]["dual_upper_set"], nlohmann::json::parse(R"([["1", "1"]])"));
}

TEST(CmdTau, FloatMode) {
  auto s = spec_for("two_atom_x.json", "two_atom_y.json");
  s.arithmetic = ArithmeticMode::floating();
  const auto out = cmd_tau(s);
  EXPECT_DOUBLE_EQ(out.report["tau"].get<double>(), 0.25);
  EXPECT_EQ(out.report["provenance"]["arithmetic"], "float");
}

TEST(CmdTau, RelationFile) {
  auto s = spec_for("diamond_x.json", "diamond_y.json");
  s.relation_path = data("relation_diamond.txt");
  s.order_kind = OrderKind::relation_file;
  const auto out = cmd_tau(s);
  EXPECT_EQ(out.report["tau"], "1");
  auto back = spec_for("diamond_y.json", "diamond_x.json");
  back.relation_path = s.relation_path;
  back.order_kind = OrderKind::relation_file;
  const auto rev = cmd_tau(back);
  EXPECT_EQ(rev.report["tau"], "0");
  EXPECT_TRUE(rev.report["certificates"].contains("dual_upper_set_labels"));
}

TEST(CmdTau, SamplesInput) {
  EXPECT_EQ(cmd_tau(spec_for("samples_x.csv", "samples_y.csv")).report["tau"], "1/4");
}

TEST(CmdTau, ErrorCodes) {
  EXPECT_EQ(code_of([] { cmd_tau(spec_for("bad_atoms.json", "two_atom_y.json")); }), exit_code::parse_error);
  EXPECT_EQ(code_of([] { cmd_tau(spec_for("bad_samples.csv", "samples_y.csv")); }), exit_code::parse_error);
  EXPECT_EQ(code_of([] { cmd_tau(spec_for("missing.json", "two_atom_y.json")); }), exit_code::parse_error);
  EXPECT_EQ(code_of([] { cmd_tau(spec_for("unnormalized.json", "two_atom_y.json")); }),
            exit_code::contract_violation);
  EXPECT_EQ(code_of([] { cmd_tau(spec_for("square_x.json", "two_atom_y.json")); }), exit_code::contract_violation);
  try {
    cmd_tau(spec_for("bad_samples.csv", "samples_y.csv"));
  } catch (const CommandError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST(CmdMeasures, TwoAtom) {
  const auto out = cmd_measures(spec_for("two_atom_x.json", "two_atom_y.json"));
  EXPECT_EQ(out.report["tau"], "1/4");
  EXPECT_EQ(out.report["r"], "3/4");
  EXPECT_EQ(out.report["alpha"], "1/2");
  EXPECT_TRUE(out.report.contains("q"));
  EXPECT_TRUE(out.report.contains("q_note"));
}

TEST(CmdMeasures, Mixture) {
  const auto out = cmd_measures(spec_for("mixture_x.json", "mixture_y.json"));
  EXPECT_EQ(out.report["r"], "0");
  EXPECT_EQ(out.report["alpha"], "0");
}

TEST(CmdMeasures, EqualInputs) {
  const auto out = cmd_measures(spec_for("mixture_x.json", "mixture_x.json"));
  for (const char* k : {"tau", "q", "r", "alpha"}) EXPECT_EQ(out.report[k], "1") << k;
}

TEST(CmdMeasures, DomainHandling) {
  auto s = spec_for("two_atom_y.json", "two_atom_y.json");
  EXPECT_EQ(code_of([&] { cmd_measures(s); }), exit_code::missing_domain);
  s.domain = std::make_pair(std::string("0"), std::string("1"));
  EXPECT_EQ(cmd_measures(s).report["r"], "1");
  EXPECT_EQ(code_of([] { cmd_measures(spec_for("square_x.json", "square_y.json")); }),
            exit_code::contract_violation);
}

TEST(CmdTest, Samples) {
  auto s = spec_for("normal_x.csv", "normal_y.csv");
  s.stats.resamples = 200;
  s.stats.seed = 7;
  const auto out = cmd_test(s);
  const auto& inf = out.report["inference"];
  const double tau = num(inf["tau_hat"]);
  EXPECT_LE(num(inf["ci_low"]), tau);
  EXPECT_GE(num(inf["ci_high"]), tau);
  EXPECT_GE(inf["p_value"].get<double>(), 0.0);
  EXPECT_LE(inf["p_value"].get<double>(), 1.0);
  EXPECT_EQ(num(inf["tau_hat"]) + num(inf["ks_minus"]), 1.0);
}

TEST(CmdTest, TwoAtomSamples) {
  auto s = spec_for("samples_x.csv", "samples_y.csv");
  s.stats.resamples = 200;
  const auto out = cmd_test(s);
  EXPECT_EQ(out.report["inference"]["tau_hat"], "1/4");
  EXPECT_TRUE(out.report["inference"]["small_sample_warning"].get<bool>());
}

TEST(CmdTest, Preconditions) {
  auto s = spec_for("samples_x.csv", "samples_y.csv");
  s.stats.resamples = 10;
  EXPECT_EQ(code_of([&] { cmd_test(s); }), exit_code::stats_precondition);
  s.stats.resamples = 200;
  s.stats.level = 1.5;
  EXPECT_EQ(code_of([&] { cmd_test(s); }), exit_code::stats_precondition);
  EXPECT_EQ(code_of([] { cmd_test(spec_for("two_atom_x.json", "two_atom_y.json")); }), exit_code::stats_precondition);
}

TEST(CmdAxioms, FixturesOnly) {
  const auto out = cmd_axioms(1, 0, ArithmeticMode::exact());
  EXPECT_EQ(out.exit_code, exit_code::ok);
  EXPECT_TRUE(out.report["tau_passes_all"].get<bool>());
  EXPECT_TRUE(out.report["rivals_fail_as_expected"].get<bool>());
}

TEST(CmdAxioms, Deterministic) {
  const auto a = cmd_axioms(20240101, 10, ArithmeticMode::exact());
  const auto b = cmd_axioms(20240101, 10, ArithmeticMode::exact());
  EXPECT_EQ(a.report.dump(2), b.report.dump(2));
  EXPECT_EQ(a.summary, b.summary);
}

TEST(CmdVerify, RoundTrip) {
  for (const auto& [x, y] : {std::pair{"two_atom_x.json", "two_atom_y.json"}, std::pair{"square_x.json", "square_y.json"},
                             std::pair{"mixture_x.json", "mixture_y.json"}}) {
    const auto s = spec_for(x, y);
    const auto report = nlohmann::json::parse(cmd_tau(s).report.dump());
    const auto out = cmd_verify(report, s);
    EXPECT_EQ(out.exit_code, exit_code::ok) << x << "\n" << out.report.dump(2);
  }
}

TEST(CmdVerify, DetectsTampering) {
  const auto s = spec_for("two_atom_x.json", "two_atom_y.json");
  auto report = cmd_tau(s).report;
  report["tau"] = "1/2";
  EXPECT_EQ(cmd_verify(report, s).exit_code, exit_code::failed_check);
  auto other = cmd_tau(s).report;
  other["certificates"]["dual_upper_set"] = nlohmann::json::parse(R"([["3/4"]])");
  EXPECT_EQ(cmd_verify(other, s).exit_code, exit_code::failed_check);
  EXPECT_FALSE(cmd_verify(other, s).report["checks"]["upper_set_closed"].get<bool>());
  auto outside = cmd_tau(s).report;
  outside["certificates"]["dual_upper_set"] = nlohmann::json::parse(R"([["5"]])");
  EXPECT_EQ(code_of([&] { cmd_verify(outside, s); }), exit_code::failed_check);
  EXPECT_EQ(code_of([&] { cmd_verify(nlohmann::json::object(), s); }), exit_code::parse_error);
}

}  // namespace
}  // namespace psd::cli
