#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "osclab_cli/config.hpp"
#include "osclab_cli/runner.hpp"

namespace {

using namespace osclab;
using namespace osclab::cli;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string hypothesis_of(const std::string& json) {
  try {
    validate_config(parse_config(json));
  } catch (const ConfigInvalid& e) {
    return e.hypothesis();
  }
  return "";
}

TEST(Config, DefaultsRoundTrip) {
  const RunConfig d;
  EXPECT_EQ(parse_config("{}"), d);
  EXPECT_EQ(parse_config(serialize_config(d)), d);
}

TEST(Config, EveryFieldRoundTrips) {
  const RunConfig c = parse_config(R"({
    "spec": {"a": 0.7, "f": {"kind": "zero"}, "g": {"kind": "tanh", "scale": 0.05},
             "d0": 0.1, "c0": 0.0, "epsilons": [0.1, 0.05], "profile": "linear",
             "mesh": {"nx": 12, "ny": 10}, "dt": 0.01, "t_final": 2.0,
             "tolerances": {"cg": 1e-11, "eigen": 1e-8, "newton": 1e-9,
                            "newton_max_iterations": 30}},
    "study": "eigs", "output_dir": "out", "seed": 42, "threads": 2,
    "eigs": {"k": 3}, "resolvent": {"lambda": -2.0, "rhs": "random"},
    "wronglimit": {"epsilons": [0.02, 0.01], "a": 0.5, "mesh": 16},
    "attractor": {"t_transient": 10, "t_sample": 2, "sample_every": 5}})");
  EXPECT_EQ(c.spec.a, 0.7);
  EXPECT_EQ(c.spec.f.kind, InteriorNonlinearity::Kind::Zero);
  EXPECT_EQ(c.spec.profile, Profile::Linear);
  EXPECT_EQ(c.spec.nx, 12);
  EXPECT_EQ(c.spec.tol.newton_max_iterations, 30);
  EXPECT_EQ(c.study, Study::Eigs);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.eig_count, 3);
  EXPECT_EQ(c.resolvent.rhs, "random");
  EXPECT_EQ(c.wronglimit.mesh, 16);
  EXPECT_EQ(c.attractor.sample_every, 5);
  EXPECT_EQ(parse_config(serialize_config(c)), c);
  EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, SchemaErrors) {
  EXPECT_EQ(hypothesis_of(R"({"spec": {"bogus": 1}})"), "schema");
  EXPECT_EQ(hypothesis_of(R"({"threads": "two"})"), "schema");
  EXPECT_EQ(hypothesis_of(R"({"spec": {"f": {"kind": "quintic"}}})"), "schema");
  EXPECT_EQ(hypothesis_of("not json"), "schema");
  EXPECT_THROW(parse_study("nope"), ConfigInvalid);
}

TEST(Config, HypothesisErrors) {
  EXPECT_EQ(hypothesis_of(R"({"spec": {"d0": -1.0}})"), "hipg2/autovalor");
  EXPECT_EQ(hypothesis_of(R"({"spec": {"a": -1.0}})"), "a>0");
  EXPECT_EQ(hypothesis_of(R"({"spec": {"f": {"kind": "zero"}, "g": {"kind": "zero"}}})"), "hipf2");
  EXPECT_EQ(hypothesis_of(R"({"eigs": {"k": 0}})"), "eigs");
  EXPECT_EQ(hypothesis_of("{}"), "");
}

TEST(Config, RobinConditionIsChecked) {
  // a - c0 = 0.1 with a strong boundary source drives lambda_0(0) negative.
  EXPECT_EQ(hypothesis_of(R"({"spec": {"a": 0.1, "c0": 0.0, "f": {"kind": "zero"},
                                      "g": {"kind": "tanh", "scale": 0.5}, "d0": 0.6,
                                      "mesh": {"nx": 8, "ny": 8}}})"),
            "autovalor");
}

TEST(Runner, SeededRandomRightHandSide) {
  RunConfig c;
  c.resolvent.rhs = "random";
  const StructuredMesh mesh(4, 4);
  const NodalField a = resolvent_rhs(c, mesh);
  const NodalField b = resolvent_rhs(c, mesh);
  EXPECT_EQ(a.values, b.values);
  for (double v : a.values) {
    EXPECT_GE(v, -1.0);
    EXPECT_LT(v, 1.0);
  }
  c.seed = 2;
  EXPECT_NE(resolvent_rhs(c, mesh).values, a.values);
}

TEST(Runner, OutputsAreByteIdenticalAcrossThreadCounts) {
  RunConfig c = parse_config(R"({
    "spec": {"f": {"kind": "zero"}, "g": {"kind": "zero"}, "c0": 0.0,
             "epsilons": [0.2, 0.1], "mesh": {"nx": 8, "ny": 8}, "t_final": 0.2},
    "study": "resolvent", "resolvent": {"rhs": "random"}})");
  const auto dir = std::filesystem::temp_directory_path() / "osclab_cli_test";
  std::filesystem::remove_all(dir);
  std::ostringstream log;
  for (int threads : {1, 2}) {
    c.threads = threads;
    c.output_dir = (dir / std::to_string(threads)).string();
    EXPECT_EQ(run(c, log), 0);
  }
  const std::string one = slurp(dir / "1" / "resolvent.csv");
  EXPECT_FALSE(one.empty());
  EXPECT_EQ(one, slurp(dir / "2" / "resolvent.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "1" / "summary.json"));
  std::filesystem::remove_all(dir);
}

}  // namespace
