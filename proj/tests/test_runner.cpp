#include <gtest/gtest.h>

#include "lglab/runner.hpp"

using namespace lglab;

namespace {

RunResult run(const std::string& cfg) { return run_experiment(parse_config_text(cfg)); }

void expect_same_artifacts(const RunResult& a, const RunResult& b) {
  ASSERT_EQ(a.artifacts.size(), b.artifacts.size());
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
    EXPECT_EQ(a.artifacts[i].name, b.artifacts[i].name);
    EXPECT_TRUE(a.artifacts[i].content == b.artifacts[i].content) << a.artifacts[i].name;
  }
}

} // namespace

TEST(Runner, EvolveWritesFramesAndPasses) {
  const RunResult r = run(R"({"experiment":"evolve","map":{"r":1,"u":[0,0.2]},
                              "evolve":{"eps":0.0628,"steps":5,"svg":true}})");
  EXPECT_TRUE(r.passed());
  EXPECT_NE(r.artifact("maps.jsonl"), nullptr);
  EXPECT_NE(r.artifact("frames/step_0005.svg"), nullptr);
  EXPECT_NE(r.artifact("evolution.svg"), nullptr);
  EXPECT_NE(r.artifact("summary.csv"), nullptr);
  std::size_t lines = 0;
  for (char ch : r.artifact("maps.jsonl")->content) lines += ch == '\n';
  EXPECT_EQ(lines, 6u);
}

TEST(Runner, CuspIsANumericalFailureWithPartialArtifacts) {
  const RunResult r = run(R"({"experiment":"evolve","map":{"r":1,"u":[0,0,0.4]},"evolve":{"eps":0.05,"steps":20}})");
  ASSERT_TRUE(r.failure.has_value());
  EXPECT_FALSE(r.passed());
  ASSERT_NE(r.artifact("failure.json"), nullptr);
  EXPECT_NE(r.artifact("maps.jsonl"), nullptr);
  EXPECT_NE(r.artifact("failure.json")->content.find("last_valid_map"), std::string::npos);
}

TEST(Runner, GasIsReproducibleAcrossThreadCounts) {
  const char* cfg = R"({"experiment":"gas","potential":{"hbar":0.05},"gas":{"N":20,"sweeps":400,"thin":4},"jobs":1})";
  const RunResult a = run(cfg);
  const RunResult b = run(cfg);
  expect_same_artifacts(a, b);
  EXPECT_NE(a.check("gas_radius"), nullptr);
}

TEST(Runner, GrowIsReproducibleAcrossThreadCounts) {
  const std::string base = R"({"experiment":"grow","potential":{"hbar":0.01},"map":{"r":1,"u":[0,0.2]},
      "grow":{"M":8,"members":20,"sweeps":40,"bins":4,"boundary_nodes":64,"darcy":false,"cue":true,
              "cue_reference_sweeps":40},"jobs":)";
  const RunResult a = run(base + "1}");
  const RunResult b = run(base + "3}");
  expect_same_artifacts(a, b);
  EXPECT_NE(a.check("cue_angular_statistics"), nullptr);
  EXPECT_NE(a.check("cue_control"), nullptr);
  EXPECT_NE(a.artifact("grow.svg"), nullptr);
}

TEST(Runner, UniversalityReportsEveryShape) {
  const RunResult r = run(R"({"experiment":"universality","potential":{"hbar":0.02},
      "universality":{"M":2,"samples":5000,"shapes":[{"id":"disk","map":{"r":1}},
                                                      {"id":"ellipse","map":{"r":1,"u":[0,0.2]}}]}})");
  EXPECT_NE(r.check("universality_reference"), nullptr);
  EXPECT_NE(r.check("universality_agreement:ellipse"), nullptr);
  EXPECT_NE(r.check("universality_control"), nullptr);
  EXPECT_NE(r.artifact("universality.json")->content.find("\"shape_id\": \"ellipse\""), std::string::npos);
}

TEST(Runner, ConfigErrorsPropagate) {
  EXPECT_THROW(run(R"({"experiment":"evolve","map":{"r":1,"u":[0,0.2]},"evolve":{"K":1}})"), validation_error);
}
