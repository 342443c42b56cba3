#ifndef LGLAB_CONFIG_HPP
#define LGLAB_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "lglab/io.hpp"

namespace lglab {

struct GasConfig {
  std::size_t N = 100;
  std::size_t sweeps = 20000;
  std::size_t thin = 10;
  double step_scale = 0.0;   // 0: adapted during burn-in
  std::size_t bins = 30;
  double r_max = 1.5;        // in units of sqrt(N hbar)
  std::size_t snapshots_written = 10;
  double radius_tolerance = 0.03;
  double plateau_tolerance = 0.05;
  double plateau_fraction = 0.5; // bins with r_high below this fraction of the radius form the plateau
  double kernel_tolerance = 0.05;
  bool svg = true;
};

struct GrowConfig {
  std::size_t M = 32;
  std::size_t members = 1000;
  std::size_t sweeps = 400;
  std::size_t bins = 32;
  std::size_t boundary_nodes = 1024;
  double l2_tolerance = 0.07;
  bool darcy = true;
  bool cue = false;
  bool cue_control = true;
  std::size_t cue_reference_sweeps = 1000;
  double alpha = 0.05;
  bool svg = true;
};

struct EvolveConfig {
  double eps = 0.0628;
  std::size_t steps = 50;
  std::size_t K = 0;          // 0: order of the initial map
  bool svg = false;
  std::size_t svg_history = 5; // earlier frames drawn in each per-step SVG
  std::size_t contour_nodes = 2048;
  double invariant_tolerance = 1e-8;
  double remeasure_tolerance = 1e-6;
};

struct ShapeConfig {
  std::string id;
  LaurentMap map;
};

struct UniversalityConfig {
  std::size_t M = 2;
  std::size_t samples = 100000;
  std::vector<ShapeConfig> shapes; // empty: the top-level map, id "map"
  double tolerance = 0.05;         // first shape against c_p^{M/2}
  double sigma_tolerance = 2.0;    // other shapes against the first
  double a_scale_control = 1.2;    // 0 disables the control
};

struct VerifyConfig {
  double schwarz_eps = 1e-3 * pi;
  std::size_t schwarz_steps = 4;
  double schwarz_tolerance = 1e-4;
  double a_ratio_tolerance = 0.01;
  double a_min_exponent = 2.95;
  double stokes_dt0 = 0.05;          // layer thickness as an increment of t0
  std::size_t stokes_angular_cells = 1024;
  std::size_t stokes_depth_cells = 8;
  double stokes_tolerance = 1e-3;
  std::vector<std::size_t> semiclassical_N{50, 100, 200};
  double semiclassical_hbar = 0.01;
  double normalization_hbar = 0.01;
  double normalization_tolerance = 0.02;
};

/// Everything needed to run one experiment. Validated on construction from JSON.
struct RunConfig {
  std::string experiment;           // gas, grow, evolve, universality, verify-all
  std::uint64_t seed = 1;
  std::string output_dir = "lg-lab-out";
  int jobs = 0;                     // 0: LG_LAB_JOBS, else 1
  Potential potential = uniform_potential(0.01);
  std::optional<LaurentMap> map;
  std::optional<MomentVector> moments;
  std::size_t K = 0;                // map order when solving from moments; 0: number of given t_k
  GasConfig gas;
  GrowConfig grow;
  EvolveConfig evolve;
  UniversalityConfig universality;
  VerifyConfig verify;

  /// Droplet map: the given map, or the solution for the given moments, or the unit-area disk.
  LaurentMap droplet() const {
    if (map) return *map;
    if (moments) {
      const std::size_t k = K != 0 ? K : std::max<std::size_t>(moments->t.size(), 1);
      return map_from_moments_continued(*moments, k);
    }
    return LaurentMap::disk(1.0);
  }
};

namespace detail {

template <typename T>
void read_number(const io::json& j, const char* key, T& out, const char* where) {
  if (!j.contains(key)) return;
  const io::json& v = j[key];
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw validation_error(std::string(where) + "." + key + ": expected a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0))
      throw validation_error(std::string(where) + "." + key + ": expected a non-negative integer");
    out = v.get<T>();
  } else {
    if (!v.is_number()) throw validation_error(std::string(where) + "." + key + ": expected a number");
    out = v.get<T>();
    if (!std::isfinite(out)) throw validation_error(std::string(where) + "." + key + ": must be finite");
  }
}

inline void require(bool ok, const std::string& message) {
  if (!ok) throw validation_error(message);
}

} // namespace detail

inline RunConfig parse_config(const io::json& j) {
  using detail::read_number;
  using detail::require;
  io::reject_unknown_keys(j,
                          {"experiment", "seed", "output_dir", "jobs", "potential", "map", "moments", "K", "gas",
                           "grow", "evolve", "universality", "verify"},
                          "config");
  RunConfig c;
  require(j.contains("experiment") && j["experiment"].is_string(), "config.experiment: required string");
  c.experiment = j["experiment"].get<std::string>();
  require(c.experiment == "gas" || c.experiment == "grow" || c.experiment == "evolve" ||
              c.experiment == "universality" || c.experiment == "verify-all",
          "config.experiment: one of gas, grow, evolve, universality, verify-all");
  read_number(j, "seed", c.seed, "config");
  if (j.contains("output_dir")) {
    require(j["output_dir"].is_string(), "config.output_dir: expected a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  read_number(j, "jobs", c.jobs, "config");
  require(c.jobs >= 0, "config.jobs: must be non-negative");
  if (j.contains("potential")) c.potential = io::potential_from_json(j["potential"]);
  if (j.contains("map")) c.map = io::map_from_json(j["map"]);
  if (j.contains("moments")) c.moments = io::moments_from_json(j["moments"]);
  require(!(c.map && c.moments), "config: give either map or moments, not both");
  read_number(j, "K", c.K, "config");

  if (j.contains("gas")) {
    const io::json& g = j["gas"];
    io::reject_unknown_keys(g,
                            {"N", "sweeps", "thin", "step_scale", "bins", "r_max", "snapshots_written",
                             "radius_tolerance", "plateau_tolerance", "plateau_fraction", "kernel_tolerance", "svg"},
                            "gas");
    read_number(g, "N", c.gas.N, "gas");
    read_number(g, "sweeps", c.gas.sweeps, "gas");
    read_number(g, "thin", c.gas.thin, "gas");
    read_number(g, "step_scale", c.gas.step_scale, "gas");
    read_number(g, "bins", c.gas.bins, "gas");
    read_number(g, "r_max", c.gas.r_max, "gas");
    read_number(g, "snapshots_written", c.gas.snapshots_written, "gas");
    read_number(g, "radius_tolerance", c.gas.radius_tolerance, "gas");
    read_number(g, "plateau_tolerance", c.gas.plateau_tolerance, "gas");
    read_number(g, "plateau_fraction", c.gas.plateau_fraction, "gas");
    read_number(g, "kernel_tolerance", c.gas.kernel_tolerance, "gas");
    read_number(g, "svg", c.gas.svg, "gas");
  }
  require(c.gas.N >= 2 && c.gas.sweeps >= 10 && c.gas.thin >= 1 && c.gas.bins >= 2 && c.gas.r_max > 0.0,
          "gas: need N >= 2, sweeps >= 10, thin >= 1, bins >= 2, r_max > 0");

  if (j.contains("grow")) {
    const io::json& g = j["grow"];
    io::reject_unknown_keys(g,
                            {"M", "members", "sweeps", "bins", "boundary_nodes", "l2_tolerance", "darcy", "cue",
                             "cue_control", "cue_reference_sweeps", "alpha", "svg"},
                            "grow");
    read_number(g, "M", c.grow.M, "grow");
    read_number(g, "members", c.grow.members, "grow");
    read_number(g, "sweeps", c.grow.sweeps, "grow");
    read_number(g, "bins", c.grow.bins, "grow");
    read_number(g, "boundary_nodes", c.grow.boundary_nodes, "grow");
    read_number(g, "l2_tolerance", c.grow.l2_tolerance, "grow");
    read_number(g, "darcy", c.grow.darcy, "grow");
    read_number(g, "cue", c.grow.cue, "grow");
    read_number(g, "cue_control", c.grow.cue_control, "grow");
    read_number(g, "cue_reference_sweeps", c.grow.cue_reference_sweeps, "grow");
    read_number(g, "alpha", c.grow.alpha, "grow");
    read_number(g, "svg", c.grow.svg, "grow");
  }
  require(c.grow.M >= 2 && c.grow.members >= 2 && c.grow.sweeps >= 10 && c.grow.bins >= 2 &&
              c.grow.boundary_nodes >= 4,
          "grow: need M >= 2, members >= 2, sweeps >= 10, bins >= 2, boundary_nodes >= 4");

  if (j.contains("evolve")) {
    const io::json& e = j["evolve"];
    io::reject_unknown_keys(e,
                            {"eps", "steps", "K", "svg", "svg_history", "contour_nodes", "invariant_tolerance",
                             "remeasure_tolerance"},
                            "evolve");
    read_number(e, "eps", c.evolve.eps, "evolve");
    read_number(e, "steps", c.evolve.steps, "evolve");
    read_number(e, "K", c.evolve.K, "evolve");
    read_number(e, "svg", c.evolve.svg, "evolve");
    read_number(e, "svg_history", c.evolve.svg_history, "evolve");
    read_number(e, "contour_nodes", c.evolve.contour_nodes, "evolve");
    read_number(e, "invariant_tolerance", c.evolve.invariant_tolerance, "evolve");
    read_number(e, "remeasure_tolerance", c.evolve.remeasure_tolerance, "evolve");
  }
  require(c.evolve.eps > 0.0 && c.evolve.steps >= 1 && c.evolve.contour_nodes >= 16,
          "evolve: need eps > 0, steps >= 1, contour_nodes >= 16");

  if (j.contains("universality")) {
    const io::json& u = j["universality"];
    io::reject_unknown_keys(u, {"M", "samples", "shapes", "tolerance", "sigma_tolerance", "a_scale_control"},
                            "universality");
    read_number(u, "M", c.universality.M, "universality");
    read_number(u, "samples", c.universality.samples, "universality");
    read_number(u, "tolerance", c.universality.tolerance, "universality");
    read_number(u, "sigma_tolerance", c.universality.sigma_tolerance, "universality");
    read_number(u, "a_scale_control", c.universality.a_scale_control, "universality");
    if (u.contains("shapes")) {
      require(u["shapes"].is_array(), "universality.shapes: expected an array");
      for (const io::json& s : u["shapes"]) {
        io::reject_unknown_keys(s, {"id", "map"}, "universality.shapes[]");
        require(s.contains("id") && s["id"].is_string() && s.contains("map"),
                "universality.shapes[]: id and map are required");
        c.universality.shapes.push_back({s["id"].get<std::string>(), io::map_from_json(s["map"])});
      }
    }
  }
  require(c.universality.M >= 1 && c.universality.samples >= 2, "universality: need M >= 1 and samples >= 2");

  if (j.contains("verify")) {
    const io::json& v = j["verify"];
    io::reject_unknown_keys(v,
                            {"schwarz_eps", "schwarz_steps", "schwarz_tolerance", "a_ratio_tolerance",
                             "a_min_exponent", "stokes_dt0", "stokes_angular_cells", "stokes_depth_cells",
                             "stokes_tolerance", "semiclassical_N", "semiclassical_hbar", "normalization_hbar",
                             "normalization_tolerance"},
                            "verify");
    read_number(v, "schwarz_eps", c.verify.schwarz_eps, "verify");
    read_number(v, "schwarz_steps", c.verify.schwarz_steps, "verify");
    read_number(v, "schwarz_tolerance", c.verify.schwarz_tolerance, "verify");
    read_number(v, "a_ratio_tolerance", c.verify.a_ratio_tolerance, "verify");
    read_number(v, "a_min_exponent", c.verify.a_min_exponent, "verify");
    read_number(v, "stokes_dt0", c.verify.stokes_dt0, "verify");
    read_number(v, "stokes_angular_cells", c.verify.stokes_angular_cells, "verify");
    read_number(v, "stokes_depth_cells", c.verify.stokes_depth_cells, "verify");
    read_number(v, "stokes_tolerance", c.verify.stokes_tolerance, "verify");
    read_number(v, "semiclassical_hbar", c.verify.semiclassical_hbar, "verify");
    read_number(v, "normalization_hbar", c.verify.normalization_hbar, "verify");
    read_number(v, "normalization_tolerance", c.verify.normalization_tolerance, "verify");
    if (v.contains("semiclassical_N")) {
      require(v["semiclassical_N"].is_array(), "verify.semiclassical_N: expected an array");
      c.verify.semiclassical_N.clear();
      for (const io::json& n : v["semiclassical_N"]) {
        require(n.is_number_unsigned(), "verify.semiclassical_N: expected positive integers");
        c.verify.semiclassical_N.push_back(n.get<std::size_t>());
      }
    }
  }
  require(c.verify.schwarz_steps >= 2 && c.verify.semiclassical_N.size() >= 2 && c.verify.stokes_dt0 > 0.0,
          "verify: need schwarz_steps >= 2, two or more semiclassical_N, stokes_dt0 > 0");
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  io::json j;
  try {
    j = io::json::parse(text);
  } catch (const io::json::parse_error& e) {
    throw validation_error(std::string("config: invalid JSON: ") + e.what());
  } catch (const io::json::exception& e) {
    throw validation_error(std::string("config: ") + e.what());
  }
  try {
    return parse_config(j);
  } catch (const io::json::exception& e) {
    throw validation_error(std::string("config: ") + e.what());
  }
}

/// Fully expanded configuration, every default made explicit. Recorded in the manifest;
/// output_dir and jobs are left out because they do not affect any artifact.
inline io::json to_json(const RunConfig& c) {
  io::json j;
  j["experiment"] = c.experiment;
  j["seed"] = c.seed;
  j["potential"] = io::to_json(c.potential);
  if (c.map) j["map"] = io::to_json(*c.map);
  if (c.moments) j["moments"] = io::to_json(*c.moments);
  j["K"] = c.K;
  j["gas"] = {{"N", c.gas.N},
              {"sweeps", c.gas.sweeps},
              {"thin", c.gas.thin},
              {"step_scale", c.gas.step_scale},
              {"bins", c.gas.bins},
              {"r_max", c.gas.r_max},
              {"snapshots_written", c.gas.snapshots_written},
              {"radius_tolerance", c.gas.radius_tolerance},
              {"plateau_tolerance", c.gas.plateau_tolerance},
              {"plateau_fraction", c.gas.plateau_fraction},
              {"kernel_tolerance", c.gas.kernel_tolerance},
              {"svg", c.gas.svg}};
  j["grow"] = {{"M", c.grow.M},
               {"members", c.grow.members},
               {"sweeps", c.grow.sweeps},
               {"bins", c.grow.bins},
               {"boundary_nodes", c.grow.boundary_nodes},
               {"l2_tolerance", c.grow.l2_tolerance},
               {"darcy", c.grow.darcy},
               {"cue", c.grow.cue},
               {"cue_control", c.grow.cue_control},
               {"cue_reference_sweeps", c.grow.cue_reference_sweeps},
               {"alpha", c.grow.alpha},
               {"svg", c.grow.svg}};
  j["evolve"] = {{"eps", c.evolve.eps},
                 {"steps", c.evolve.steps},
                 {"K", c.evolve.K},
                 {"svg", c.evolve.svg},
                 {"svg_history", c.evolve.svg_history},
                 {"contour_nodes", c.evolve.contour_nodes},
                 {"invariant_tolerance", c.evolve.invariant_tolerance},
                 {"remeasure_tolerance", c.evolve.remeasure_tolerance}};
  io::json shapes = io::json::array();
  for (const ShapeConfig& s : c.universality.shapes) shapes.push_back({{"id", s.id}, {"map", io::to_json(s.map)}});
  j["universality"] = {{"M", c.universality.M},
                       {"samples", c.universality.samples},
                       {"shapes", shapes},
                       {"tolerance", c.universality.tolerance},
                       {"sigma_tolerance", c.universality.sigma_tolerance},
                       {"a_scale_control", c.universality.a_scale_control}};
  j["verify"] = {{"schwarz_eps", c.verify.schwarz_eps},
                 {"schwarz_steps", c.verify.schwarz_steps},
                 {"schwarz_tolerance", c.verify.schwarz_tolerance},
                 {"a_ratio_tolerance", c.verify.a_ratio_tolerance},
                 {"a_min_exponent", c.verify.a_min_exponent},
                 {"stokes_dt0", c.verify.stokes_dt0},
                 {"stokes_angular_cells", c.verify.stokes_angular_cells},
                 {"stokes_depth_cells", c.verify.stokes_depth_cells},
                 {"stokes_tolerance", c.verify.stokes_tolerance},
                 {"semiclassical_N", c.verify.semiclassical_N},
                 {"semiclassical_hbar", c.verify.semiclassical_hbar},
                 {"normalization_hbar", c.verify.normalization_hbar},
                 {"normalization_tolerance", c.verify.normalization_tolerance}};
  return j;
}

} // namespace lglab

#endif
