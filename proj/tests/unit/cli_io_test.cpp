#include "psd/cli/io.hpp"
#include "test_util.hpp"

namespace psd::cli {
namespace {

using psd::testing::Q;

TEST(InputKind, ByExtension) {
  EXPECT_EQ(infer_input_kind("a/b.json"), InputKind::atoms_json);
  EXPECT_EQ(infer_input_kind("a/b.JSON"), InputKind::atoms_json);
  EXPECT_EQ(infer_input_kind("a/b.csv"), InputKind::samples_csv);
  EXPECT_EQ(infer_input_kind("a/b.txt"), InputKind::samples_csv);
}

TEST(Sha256, KnownDigest) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(SamplesCsv, PlainColumn) {
  const auto s = parse_samples_csv<Rational>("# comment\n1\n2.5\n\n3/4  # trailing\n", "x.csv");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.observations[1][0], Q(5, 2));
  EXPECT_EQ(s.observations[2][0], Q(3, 4));
  EXPECT_FALSE(s.weighted());
}

TEST(SamplesCsv, HeaderWithWeights) {
  const auto s = parse_samples_csv<Rational>("a,b,weight\n0,1,2\n1 1 1\n", "x.csv");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.dimension(), 2u);
  EXPECT_EQ(s.weights, (std::vector<Rational>{Q(2), Q(1)}));
}

TEST(SamplesCsv, ErrorsNameTheLine) {
  try {
    parse_samples_csv<double>("1.0\n2.0\nabc\n", "bad.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse_error);
    EXPECT_NE(std::string(e.what()).find("bad.csv:3"), std::string::npos) << e.what();
  }
  EXPECT_PSD_ERROR(parse_samples_csv<double>("1 2\n3\n", "x"), parse_error);
  EXPECT_PSD_ERROR(parse_samples_csv<double>("v,weight\n1,-2\n", "x"), parse_error);
  EXPECT_PSD_ERROR(parse_samples_csv<double>("# nothing\n", "x"), empty_sample);
}

TEST(AtomsJson, Formats) {
  const auto m = parse_atoms_json<Rational>(R"([{"point": [0], "weight": "1/4"}, {"point": 1, "weight": 0.75}])", "m");
  EXPECT_EQ(m, make_discrete_1d<Rational>({Q(0), Q(1)}, {Q(1, 4), Q(3, 4)}));
  const auto w = parse_atoms_json<Rational>(R"({"atoms": [{"point": [1, 2], "weight": 1}]})", "w");
  EXPECT_EQ(w.dimension(), 2u);
}

TEST(AtomsJson, Labels) {
  const auto m = parse_atoms_json<Rational>(R"([{"point": "top", "weight": 1}])", "m", {"bottom", "top"});
  EXPECT_EQ(m.points()[0], (Point<Rational>{Q(1)}));
  EXPECT_PSD_ERROR(parse_atoms_json<Rational>(R"([{"point": "side", "weight": 1}])", "m", {"bottom", "top"}),
                   point_not_in_relation);
}

TEST(AtomsJson, Errors) {
  EXPECT_PSD_ERROR(parse_atoms_json<Rational>("[{", "m"), parse_error);
  EXPECT_PSD_ERROR(parse_atoms_json<Rational>(R"([{"point": [0]}])", "m"), parse_error);
  EXPECT_PSD_ERROR(parse_atoms_json<Rational>(R"([{"point": [0], "weight": "x"}])", "m"), parse_error);
  EXPECT_PSD_ERROR(parse_atoms_json<Rational>(R"([{"point": [0], "weight": -1}])", "m"), negative_weight);
  EXPECT_PSD_ERROR(parse_atoms_json<Rational>("{}", "m"), parse_error);
}

TEST(Relation, NumericPoints) {
  const auto rel = parse_relation<Rational>("points 3\n0\n1\n2\nedges\n0 1\n1 2\n", "r");
  EXPECT_TRUE(rel.leq(0, 2));
  EXPECT_TRUE(rel.labels().empty());
}

TEST(Relation, Labels) {
  const auto rel = parse_relation<Rational>("points 2  # two\nlow\nhigh\nedges\n0 1\n", "r");
  EXPECT_EQ(rel.labels(), (std::vector<std::string>{"low", "high"}));
  EXPECT_TRUE(rel.leq(0, 1));
}

TEST(Relation, Errors) {
  EXPECT_PSD_ERROR(parse_relation<Rational>("", "r"), parse_error);
  EXPECT_PSD_ERROR(parse_relation<Rational>("points x\n", "r"), parse_error);
  EXPECT_PSD_ERROR(parse_relation<Rational>("points 2\n0\n1\nedges\n0 5\n", "r"), parse_error);
  EXPECT_PSD_ERROR(parse_relation<Rational>("points 2\n0\n1\nedges\n0 1\n1 0\n", "r"), cycle_detected);
  EXPECT_PSD_ERROR(parse_relation<Rational>("points 3\n0\n1\n", "r"), parse_error);
}

TEST(Empirical, NormalizesWeights) {
  const auto s = parse_samples_csv<Rational>("value,weight\n0,1\n1,3\n", "x");
  EXPECT_EQ(empirical(s), make_discrete_1d<Rational>({Q(0), Q(1)}, {Q(1, 4), Q(3, 4)}));
}

}  // namespace
}  // namespace psd::cli
