// lg-lab: config-driven experiment runner.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 bad configuration or
// arguments, 3 numerical failure (partial artifacts and failure.json written),
// 4 I/O error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "lglab/lglab.hpp"

namespace {

using lglab::io::json;

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw lglab::error("sha256 failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

struct Overrides {
  std::string config_path;
  std::optional<long long> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
  std::optional<double> hbar;
  // evolve
  std::optional<double> t[5];
  std::optional<double> eps;
  std::optional<long long> steps;
  bool svg = false;
  // gas / grow / universality
  std::optional<long long> N, M, members, sweeps, samples;
  bool all = false;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  const std::string text = lglab::io::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw lglab::validation_error("config " + path + ": invalid JSON: " + e.what());
  }
}

json& section(json& j, const char* name) {
  if (!j.contains(name)) j[name] = json::object();
  return j[name];
}

json build_config(const std::string& experiment, const Overrides& o) {
  json j = load_config(o.config_path);
  if (!j.is_object()) throw lglab::validation_error("config: expected a JSON object");
  if (!experiment.empty()) j["experiment"] = experiment;
  if (o.seed) {
    if (*o.seed < 0) throw lglab::validation_error("--seed must be non-negative");
    j["seed"] = static_cast<std::uint64_t>(*o.seed);
  }
  if (o.out) j["output_dir"] = *o.out;
  if (o.jobs) j["jobs"] = *o.jobs;
  if (o.hbar) section(j, "potential")["hbar"] = *o.hbar;

  bool any_t = false;
  for (int k = 1; k <= 4; ++k) any_t = any_t || o.t[k].has_value();
  if (o.t[0] || any_t) {
    if (!o.t[0]) throw lglab::validation_error("--t1..--t4 need --t0");
    json m;
    m["t0"] = *o.t[0];
    int last = 0;
    for (int k = 1; k <= 4; ++k)
      if (o.t[k]) last = k;
    json t = json::array();
    for (int k = 1; k <= last; ++k) t.push_back(o.t[k].value_or(0.0));
    m["t"] = t;
    j.erase("map");
    j["moments"] = m;
  }
  if (o.eps) section(j, "evolve")["eps"] = *o.eps;
  if (o.steps) section(j, "evolve")["steps"] = *o.steps;
  if (o.svg) section(j, "evolve")["svg"] = true;
  if (o.N) section(j, "gas")["N"] = *o.N;
  if (o.M) section(j, experiment == "universality" ? "universality" : "grow")["M"] = *o.M;
  if (o.members) section(j, "grow")["members"] = *o.members;
  if (o.sweeps) section(j, experiment == "gas" ? "gas" : "grow")["sweeps"] = *o.sweeps;
  if (o.samples) section(j, "universality")["samples"] = *o.samples;
  return j;
}

int execute(const json& cfg_json) {
  const lglab::RunConfig cfg = lglab::parse_config(cfg_json);
  const lglab::RunResult result = lglab::run_experiment(cfg);
  const std::filesystem::path out = cfg.output_dir;

  json manifest;
  manifest["experiment"] = cfg.experiment;
  manifest["seed"] = cfg.seed;
  manifest["status"] = result.failure ? "numerical_failure" : (result.passed() ? "passed" : "check_failed");
  manifest["config"] = lglab::to_json(cfg);
  manifest["checks"] = json::array();
  for (const lglab::CheckReport& c : result.checks) manifest["checks"].push_back({{"name", c.name}, {"passed", c.passed}});
  manifest["files"] = json::array();
  for (const lglab::Artifact& a : result.artifacts) {
    lglab::io::write_file(out / a.name, a.content);
    manifest["files"].push_back({{"path", a.name}, {"sha256", sha256_hex(a.content)}, {"bytes", a.content.size()}});
  }
  lglab::io::write_file(out / "manifest.json", manifest.dump(2) + "\n");

  for (const lglab::CheckReport& c : result.checks)
    std::printf("%-4s %-34s lhs=%.6g rhs=%.6g err=%.3g tol=%.3g\n", c.passed ? "ok" : "FAIL", c.name.c_str(), c.lhs,
                c.rhs, c.near_zero ? c.abs_error : c.rel_error, c.tolerance);
  std::printf("%zu artifacts written to %s\n", result.artifacts.size() + 1, out.string().c_str());
  if (result.failure) {
    std::fprintf(stderr, "lg-lab: numerical failure: %s\n", result.failure->c_str());
    return 3;
  }
  return result.passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"lg-lab: stochastic Laplacian growth experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "override the configured seed");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--jobs", o.jobs, "worker threads (default LG_LAB_JOBS or 1)");

  CLI::App* run = app.add_subcommand("run", "run the experiment named in --config");
  CLI::App* gas = app.add_subcommand("gas", "Metropolis sampling of the eigenvalue gas");
  CLI::App* grow = app.add_subcommand("grow", "layer ensemble: Darcy and CUE statistics");
  CLI::App* evolve = app.add_subcommand("evolve", "classical growth by moment conservation");
  CLI::App* univ = app.add_subcommand("universality", "fluctuation partition function estimate");
  CLI::App* verify = app.add_subcommand("verify", "deterministic identity checks");

  for (CLI::App* sub : {gas, grow, evolve, univ}) sub->add_option("--hbar", o.hbar, "hbar");
  gas->add_option("--N", o.N, "number of eigenvalues");
  gas->add_option("--sweeps", o.sweeps, "Metropolis sweeps");
  grow->add_option("--M", o.M, "points per layer");
  grow->add_option("--members", o.members, "ensemble size");
  grow->add_option("--sweeps", o.sweeps, "sweeps per member");
  univ->add_option("--M", o.M, "points per layer");
  univ->add_option("--samples", o.samples, "importance samples");
  for (int k = 0; k <= 4; ++k)
    evolve->add_option("--t" + std::to_string(k), o.t[k], k == 0 ? "area moment t0" : "exterior moment (real)");
  evolve->add_option("--eps", o.eps, "area added per step");
  evolve->add_option("--steps", o.steps, "number of steps");
  evolve->add_flag("--svg", o.svg, "write an SVG frame per step");
  verify->add_flag("--all", o.all, "run every check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::string experiment;
    if (*gas) experiment = "gas";
    if (*grow) experiment = "grow";
    if (*evolve) experiment = "evolve";
    if (*univ) experiment = "universality";
    if (*verify) {
      if (!o.all) throw lglab::validation_error("verify: pass --all");
      experiment = "verify-all";
    }
    if (*run && o.config_path.empty()) throw lglab::validation_error("run: --config is required");
    return execute(build_config(experiment, o));
  } catch (const lglab::validation_error& e) {
    std::fprintf(stderr, "lg-lab: configuration error: %s\n", e.what());
    return 2;
  } catch (const lglab::io_error& e) {
    std::fprintf(stderr, "lg-lab: I/O error: %s\n", e.what());
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "lg-lab: I/O error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lg-lab: numerical failure: %s\n", e.what());
    return 3;
  }
}
