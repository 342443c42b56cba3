#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include <openssl/evp.h>

#include "lglab/config.hpp"
#include "lglab/io.hpp"

namespace fs = std::filesystem;
using lglab::io::json;

namespace {

int lg_lab(const std::string& args) {
  const std::string cmd = std::string(LGLAB_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("lglab_cli_" + name);
  fs::remove_all(d);
  return d;
}

std::string sha256(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int n = 0;
  EVP_Digest(data.data(), data.size(), md, &n, EVP_sha256(), nullptr);
  char hex[3];
  std::string out;
  for (unsigned int i = 0; i < n; ++i) {
    std::snprintf(hex, sizeof hex, "%02x", md[i]);
    out += hex;
  }
  return out;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("lglab_cli_" + name + ".json");
  lglab::io::write_file(p, text);
  return p;
}

} // namespace

TEST(Cli, VerifyAllPassesAndManifestHashesMatch) {
  const fs::path out = fresh_dir("verify");
  EXPECT_EQ(lg_lab("verify --all --seed 7 --out " + out.string()), 0);
  const json manifest = json::parse(lglab::io::read_file(out / "manifest.json"));
  EXPECT_EQ(manifest["status"], "passed");
  EXPECT_EQ(manifest["seed"], 7);
  ASSERT_FALSE(manifest["files"].empty());
  for (const json& f : manifest["files"])
    EXPECT_EQ(sha256(lglab::io::read_file(out / f["path"].get<std::string>())), f["sha256"]) << f["path"];
}

TEST(Cli, EvolveIsByteIdenticalOnRerun) {
  const fs::path a = fresh_dir("evolve_a"), b = fresh_dir("evolve_b");
  const std::string args = "evolve --t0 0.96 --t2 0.1 --eps 0.0628 --steps 8 --svg --out ";
  ASSERT_EQ(lg_lab(args + a.string()), 0);
  ASSERT_EQ(lg_lab(args + b.string()), 0);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    const fs::path rel = fs::relative(e.path(), a);
    EXPECT_EQ(lglab::io::read_file(e.path()), lglab::io::read_file(b / rel)) << rel;
  }
  EXPECT_GE(files, 12u); // 9 frames, evolution.svg, maps.jsonl, summary.csv, manifest.json
}

TEST(Cli, RunWithConfigFileAndSeedOverride) {
  const fs::path cfg = write_config("univ", R"({"experiment":"universality","potential":{"hbar":0.02},
      "universality":{"M":2,"samples":20000,"shapes":[{"id":"disk","map":{"r":1}}]}})");
  const fs::path a = fresh_dir("univ_a"), b = fresh_dir("univ_b");
  ASSERT_EQ(lg_lab("run --config " + cfg.string() + " --seed 3 --out " + a.string()), 0);
  ASSERT_EQ(lg_lab("run --config " + cfg.string() + " --seed 4 --out " + b.string()), 0);
  EXPECT_NE(lglab::io::read_file(a / "universality.json"), lglab::io::read_file(b / "universality.json"));
  EXPECT_TRUE(fs::exists(a / "summary.csv"));
}

TEST(Cli, ConfigurationErrorsExitTwo) {
  const fs::path cfg = write_config("bad", R"({"experiment":"gas","gas":{"N":10,"colour":"red"}})");
  EXPECT_EQ(lg_lab("run --config " + cfg.string() + " --out " + fresh_dir("bad").string()), 2);
  EXPECT_EQ(lg_lab("verify"), 2);
  EXPECT_EQ(lg_lab("evolve --t2 0.1"), 2);
  EXPECT_EQ(lg_lab("no-such-command"), 2);
  EXPECT_EQ(lg_lab("run"), 2);
}

TEST(Cli, NumericalFailureExitsThreeWithFailureReport) {
  const fs::path cfg = write_config("cusp", R"({"experiment":"evolve","map":{"r":1,"u":[0,0,0.4]},
      "evolve":{"eps":0.05,"steps":20}})");
  const fs::path out = fresh_dir("cusp");
  EXPECT_EQ(lg_lab("run --config " + cfg.string() + " --out " + out.string()), 3);
  EXPECT_TRUE(fs::exists(out / "failure.json"));
  EXPECT_TRUE(fs::exists(out / "maps.jsonl"));
  EXPECT_EQ(json::parse(lglab::io::read_file(out / "manifest.json"))["status"], "numerical_failure");
}

TEST(Cli, UnwritableOutputExitsFour) {
  EXPECT_EQ(lg_lab("evolve --t0 1 --steps 2 --out /dev/null/lglab"), 4);
}

TEST(Cli, ShippedConfigsParse) {
  for (const auto& e : fs::directory_iterator(LGLAB_CONFIGS)) {
    if (e.path().extension() != ".json" || e.path().filename() == "schema.json") continue;
    EXPECT_NO_THROW(lglab::parse_config_text(lglab::io::read_file(e.path()))) << e.path();
  }
}
