#ifndef LGLAB_RUNNER_HPP
#define LGLAB_RUNNER_HPP

#include <algorithm>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lglab/config.hpp"
#include "lglab/gas.hpp"
#include "lglab/growth.hpp"
#include "lglab/io.hpp"
#include "lglab/parallel.hpp"
#include "lglab/schwarz.hpp"
#include "lglab/svg.hpp"
#include "lglab/verify.hpp"

namespace lglab {

struct Artifact {
  std::string name; // path relative to the output directory
  std::string content;
};

/// Outcome of one experiment. Artifacts are kept in memory in emission order;
/// writing them is left to the caller.
struct RunResult {
  std::vector<Artifact> artifacts;
  std::vector<CheckReport> checks;
  std::optional<std::string> failure; // set when a numerical error stopped the run

  bool passed() const {
    if (failure) return false;
    return std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.passed; });
  }

  const CheckReport* check(const std::string& name) const {
    for (const CheckReport& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  const Artifact* artifact(const std::string& name) const {
    for (const Artifact& a : artifacts)
      if (a.name == name) return &a;
    return nullptr;
  }
};

namespace detail {

inline void emit(RunResult& out, std::string name, std::string content) {
  out.artifacts.push_back({std::move(name), std::move(content)});
}

inline std::string dump(const io::json& j) { return j.dump(2) + "\n"; }

inline bool plain_quadratic(const Potential& p) {
  return p.background.kind == BackgroundKind::uniform && p.couplings.empty();
}

inline void run_gas(const RunConfig& c, RunResult& out) {
  const GasConfig& g = c.gas;
  const Potential& p = c.potential;
  const double hbar = p.hbar;
  const double radius = std::sqrt(static_cast<double>(g.N) * hbar);
  const std::vector<GasState> snaps = gas_snapshots(p, g.N, g.sweeps, g.thin, c.seed, g.step_scale);
  if (snaps.empty()) throw validation_error("gas: no snapshots after burn-in; raise sweeps or lower thin");
  const RadialHistogram h = radial_density(snaps, g.bins, g.r_max * radius);

  std::ostringstream pts;
  pts << "snapshot,re,im\n";
  const std::size_t first = snaps.size() > g.snapshots_written ? snaps.size() - g.snapshots_written : 0;
  for (std::size_t s = first; s < snaps.size(); ++s)
    for (const cplx& z : snaps[s].points) pts << s << ',' << io::fmt(z.real()) << ',' << io::fmt(z.imag()) << '\n';
  emit(out, "snapshots.csv", pts.str());
  emit(out, "radial.csv", io::radial_csv(h, g.N, hbar));

  const double r_meas = droplet_radius(snaps);
  if (plain_quadratic(p)) {
    CheckReport rc = make_report("gas_radius", r_meas, radius, g.radius_tolerance);
    rc.seed = c.seed;
    out.checks.push_back(rc);

    double num = 0.0, den = 0.0, err_num = 0.0, err_den = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double area = pi * (h.r_high[k] * h.r_high[k] - h.r_low[k] * h.r_low[k]);
      if (h.r_high[k] <= g.plateau_fraction * radius) {
        num += h.density[k] * area;
        den += area;
      }
      const QuadratureRule q = gauss_legendre(16, h.r_low[k], h.r_high[k]);
      double e = 0.0, a = 0.0;
      for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        e += q.weights[i] * q.nodes[i] * ginibre_mean_density(g.N, hbar, q.nodes[i]);
        a += q.weights[i] * q.nodes[i];
      }
      e /= a;
      err_num += area * (h.density[k] - e) * (h.density[k] - e);
      err_den += area * e * e;
    }
    if (!(den > 0.0)) throw validation_error("gas: no histogram bin lies inside the plateau region");
    CheckReport rp = make_report("gas_plateau", num / den, 1.0 / (pi * hbar), g.plateau_tolerance);
    rp.seed = c.seed;
    out.checks.push_back(rp);
    CheckReport rk = make_report("gas_kernel_l2", std::sqrt(err_num / err_den), 0.0, g.kernel_tolerance);
    rk.seed = c.seed;
    out.checks.push_back(rk);
  }

  io::json j;
  j["seed"] = c.seed;
  j["potential"] = io::to_json(p);
  j["N"] = g.N;
  j["sweeps"] = g.sweeps;
  j["burn_in_sweeps"] = static_cast<std::size_t>(0.2 * static_cast<double>(g.sweeps));
  j["thin"] = g.thin;
  j["snapshots"] = snaps.size();
  j["acceptance"] = snaps.back().acceptance_rate;
  j["step_scale"] = snaps.back().step_scale;
  j["droplet_radius"] = r_meas;
  j["expected_radius"] = radius;
  emit(out, "gas.json", dump(j));

  if (g.svg) {
    SvgOptions so;
    so.points = snaps.back().points;
    emit(out, "gas.svg", render_boundary_svg(LaurentMap::disk(radius), so));
  }
}

inline void run_grow(const RunConfig& c, RunResult& out) {
  const GrowConfig& g = c.grow;
  const Potential& p = c.potential;
  const double hbar = p.hbar;
  const unsigned jobs = resolve_jobs(c.jobs);
  const LaurentMap map = c.droplet();
  const SchwarzPotential sp(map, p);
  const Boundary b = boundary_grid(map, p, g.boundary_nodes);
  LayerOptions lo;
  lo.sweeps = g.sweeps;
  const std::vector<LayerSample> ensemble = sample_layer_ensemble(sp, hbar, g.M, g.members, c.seed, lo, jobs);

  emit(out, "boundary.csv", io::boundary_csv(b));
  emit(out, "layer.csv", io::layer_csv(ensemble));

  const DarcyReport darcy = darcy_report(ensemble, b, g.bins);
  emit(out, "width.csv", io::width_csv(darcy.histogram));
  io::json dj = io::to_json(darcy);
  dj["seed"] = c.seed;
  emit(out, "darcy.json", dump(dj));
  if (g.darcy) {
    CheckReport r = make_report("darcy_l2", darcy.l2_error, 0.0, g.l2_tolerance);
    r.metrics["collected_area"] = darcy.histogram.collected_area;
    r.metrics["expected_area"] = static_cast<double>(g.M) * hbar;
    r.metrics["empty_bins"] = static_cast<double>(darcy.histogram.empty_bins);
    r.resolution["bins"] = static_cast<double>(g.bins);
    r.resolution["members"] = static_cast<double>(g.members);
    r.seed = c.seed;
    out.checks.push_back(r);
  }

  if (g.cue) {
    CueOptions co;
    co.reference.sweeps = g.cue_reference_sweeps;
    co.alpha = g.alpha;
    co.jobs = jobs;
    const CheckReport cue = cue_angular_statistics(ensemble, g.M, derive_seed(c.seed, 101), co);
    out.checks.push_back(cue);
    io::json cj;
    cj["cue"] = io::to_json(cue);
    if (g.cue_control) {
      LayerOptions ctrl_opts = lo;
      ctrl_opts.repulsion = false;
      const std::vector<LayerSample> ctrl =
          sample_layer_ensemble(sp, hbar, g.M, g.members, derive_seed(c.seed, 102), ctrl_opts, jobs);
      CheckReport cr = cue_angular_statistics(ctrl, g.M, derive_seed(c.seed, 101), co);
      cr.name = "cue_control";
      cr.passed = !cr.passed; // independent points must be told apart from CUE
      out.checks.push_back(cr);
      cj["control"] = io::to_json(cr);
    }
    emit(out, "cue.json", dump(cj));
  }

  if (g.svg) {
    SvgOptions so;
    so.points = ensemble.front().points;
    const std::size_t stride = std::max<std::size_t>(1, b.nodes.size() / 128);
    for (std::size_t i = 0; i < b.nodes.size(); i += stride)
      so.widths.push_back({b.nodes[i].z, b.nodes[i].normal, classical_width(b, static_cast<double>(g.M) * hbar, i)});
    emit(out, "grow.svg", render_boundary_svg(map, so));
  }
}

inline void run_evolve(const RunConfig& c, RunResult& out) {
  const EvolveConfig& e = c.evolve;
  const Potential& p = c.potential;
  const LaurentMap start = c.droplet();
  std::vector<GrowthStep> steps;
  EvolveOptions eo;
  eo.K = e.K;
  // the per-step invariants are re-checked below and reported, not thrown
  eo.invariant_tolerance = std::numeric_limits<double>::infinity();
  eo.on_step = [&](const GrowthStep& s) { steps.push_back(s); };

  std::optional<std::string> failure;
  EvolveResult res;
  try {
    res = evolve_classical_until_cusp(start, p, e.eps, e.steps, eo);
    if (res.cusp) failure = "cusp after " + std::to_string(steps.size()) + " steps: " + res.stop_reason;
  } catch (const validation_error&) {
    throw;
  } catch (const error& ex) {
    failure = ex.what();
  }

  LaurentMap initial = start;
  const std::size_t K = e.K != 0 ? e.K : std::max<std::size_t>(start.order(), 1);
  initial.u.resize(K);
  emit(out, "maps.jsonl", io::maps_jsonl(steps, initial));

  // invariants from the solver's own moment quadrature
  const MomentVector m0 = moments_from_map(initial, p, K);
  double area_dev = 0.0, drift = 0.0;
  for (const GrowthStep& s : steps) {
    area_dev = std::max(area_dev, std::abs(area_from_coefficients(s.after) - area_from_coefficients(s.before) - e.eps));
    for (std::size_t k = 1; k <= K; ++k)
      drift = std::max(drift, std::abs(s.conserved_moments.exterior(k) - m0.exterior(k)));
  }
  // independent re-measurement from boundary points
  double re_area = 0.0, re_drift = 0.0;
  MomentVector prev = remeasure_moments(initial, K, e.contour_nodes);
  const MomentVector first = prev;
  for (const GrowthStep& s : steps) {
    const MomentVector cur = remeasure_moments(s.after, K, e.contour_nodes);
    re_area = std::max(re_area, std::abs(pi * (cur.t0 - prev.t0) - e.eps));
    for (std::size_t k = 1; k <= K; ++k) re_drift = std::max(re_drift, std::abs(cur.exterior(k) - first.exterior(k)));
    prev = cur;
  }
  CheckReport ra = make_report("evolve_area_increment", area_dev, 0.0, e.invariant_tolerance);
  CheckReport rm = make_report("evolve_moment_drift", drift, 0.0, e.invariant_tolerance);
  CheckReport rc = make_report("evolve_contour_remeasure", std::max(re_area, re_drift), 0.0, e.remeasure_tolerance);
  rc.metrics["area_increment_deviation"] = re_area;
  rc.metrics["moment_drift"] = re_drift;
  rc.resolution["contour_nodes"] = static_cast<double>(e.contour_nodes);
  for (CheckReport* r : {&ra, &rm, &rc}) {
    r->metrics["steps_completed"] = static_cast<double>(steps.size());
    out.checks.push_back(*r);
  }

  const std::vector<LaurentMap> frames = [&] {
    std::vector<LaurentMap> f{initial};
    for (const GrowthStep& s : steps) f.push_back(s.after);
    return f;
  }();
  if (e.svg) {
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const std::size_t lo = i > e.svg_history ? i - e.svg_history : 0;
      char name[40];
      std::snprintf(name, sizeof name, "frames/step_%04zu.svg", i);
      emit(out, name,
           render_boundary_svg(std::vector<LaurentMap>(frames.begin() + static_cast<std::ptrdiff_t>(lo),
                                                       frames.begin() + static_cast<std::ptrdiff_t>(i) + 1)));
    }
    emit(out, "evolution.svg", render_boundary_svg(frames));
  }
  if (failure) {
    out.failure = *failure;
    io::json fj;
    fj["error"] = *failure;
    fj["steps_completed"] = steps.size();
    fj["last_valid_map"] = io::to_json(res.cusp ? res.last_valid : frames.back());
    emit(out, "failure.json", dump(fj));
  }
}

inline void run_universality(const RunConfig& c, RunResult& out) {
  const UniversalityConfig& u = c.universality;
  const Potential& p = c.potential;
  std::vector<ShapeConfig> shapes = u.shapes;
  if (shapes.empty()) shapes.push_back({"map", c.droplet()});
  PartitionOptions po;
  po.jobs = resolve_jobs(c.jobs);
  std::vector<UniversalityReport> reports;
  for (std::size_t i = 0; i < shapes.size(); ++i)
    reports.push_back(partition_function_mc(shapes[i].map, p, p.hbar, u.M, u.samples, derive_seed(c.seed, i),
                                            shapes[i].id, po));

  io::json j;
  j["reports"] = io::json::array();
  for (const UniversalityReport& r : reports) j["reports"].push_back(io::to_json(r));

  CheckReport ref = make_report("universality_reference", reports[0].Z_estimate, reports[0].reference, u.tolerance);
  ref.metrics["stderr"] = reports[0].stderr;
  ref.metrics["ess"] = reports[0].ess;
  ref.resolution["samples"] = static_cast<double>(u.samples);
  ref.seed = reports[0].seed;
  out.checks.push_back(ref);
  for (std::size_t i = 1; i < reports.size(); ++i) {
    CheckReport r = make_report("universality_agreement:" + shapes[i].id, combined_sigma_distance(reports[0], reports[i]),
                                0.0, u.sigma_tolerance);
    r.metrics["Z_" + shapes[0].id] = reports[0].Z_estimate;
    r.metrics["Z_" + shapes[i].id] = reports[i].Z_estimate;
    r.seed = reports[i].seed;
    out.checks.push_back(r);
  }
  if (u.a_scale_control > 0.0 && u.a_scale_control != 1.0) {
    PartitionOptions co = po;
    co.a_scale = u.a_scale_control;
    const UniversalityReport ctrl = partition_function_mc(shapes[0].map, p, p.hbar, u.M, u.samples,
                                                          derive_seed(c.seed, 0), shapes[0].id + "_control", co);
    CheckReport r = make_report("universality_control", combined_sigma_distance(reports[0], ctrl), 0.0,
                                u.sigma_tolerance);
    r.metrics["Z_control"] = ctrl.Z_estimate;
    r.metrics["a_scale"] = u.a_scale_control;
    // a mis-specified target must be distinguishable from the true one
    r.passed = !r.passed && std::abs(ctrl.Z_estimate / ctrl.reference - 1.0) > u.tolerance;
    out.checks.push_back(r);
    j["control"] = io::to_json(ctrl);
  }
  emit(out, "universality.json", dump(j));
}

inline void run_verify(const RunConfig& c, RunResult& out) {
  const VerifyConfig& v = c.verify;
  const Potential& p = c.potential;
  const LaurentMap droplet = c.droplet();
  const LaurentMap disk = LaurentMap::disk(1.0);

  {
    const std::vector<LaurentMap> maps = map_sequence(evolve_classical(droplet, p, v.schwarz_eps, v.schwarz_steps));
    SchwarzVelocityOptions so;
    so.tolerance = v.schwarz_tolerance;
    out.checks.push_back(check_schwarz_velocity(maps, 1.0, so));
    so.velocity_scale = 1.1;
    CheckReport ctrl = check_schwarz_velocity(maps, 1.0, so);
    ctrl.name = "schwarz_velocity_control";
    ctrl.passed = !ctrl.passed;
    out.checks.push_back(ctrl);
  }

  AExpansionOptions ao;
  ao.ratio_tolerance = v.a_ratio_tolerance;
  ao.min_exponent = v.a_min_exponent;
  CheckReport a_disk = check_a_expansion(SchwarzPotential(disk, p), ao);
  a_disk.name = "a_expansion:disk";
  out.checks.push_back(a_disk);
  CheckReport a_drop = check_a_expansion(SchwarzPotential(droplet, p), ao);
  a_drop.name = "a_expansion:droplet";
  out.checks.push_back(a_drop);

  StokesOptions st;
  st.angular_cells = v.stokes_angular_cells;
  st.depth_cells = v.stokes_depth_cells;
  st.tolerance = v.stokes_tolerance;
  CheckReport s_ann = check_stokes(disk, LaurentMap::disk(std::sqrt(1.0 + v.stokes_dt0)), p, st);
  s_ann.name = "stokes:annulus";
  out.checks.push_back(s_ann);
  {
    const std::size_t K = std::max<std::size_t>(droplet.order(), 1);
    MomentVector m = moments_from_map(droplet, p, K);
    m.t0 += v.stokes_dt0;
    m.v.clear();
    CheckReport s_drop = check_stokes(droplet, map_from_moments(m, K, droplet), p, st);
    s_drop.name = "stokes:droplet";
    out.checks.push_back(s_drop);
  }

  const SemiclassicalReport sc = semiclassical_vs_exact(v.semiclassical_N, v.semiclassical_hbar);
  out.checks.push_back(sc.check);
  io::json rows = io::json::array();
  for (std::size_t i = 0; i < sc.rows.size(); ++i)
    rows.push_back({{"N", sc.rows[i].N},
                    {"sup_rel_error", sc.rows[i].sup_rel_error},
                    {"peak_ratio", sc.rows[i].peak_ratio},
                    {"control_sup_rel_error", sc.control_rows[i].sup_rel_error}});

  for (const auto& [name, m] : {std::pair<const char*, LaurentMap>{"normalization:disk", disk},
                                std::pair<const char*, LaurentMap>{"normalization:droplet", droplet}}) {
    Potential pn = p;
    pn.hbar = v.normalization_hbar;
    CheckReport r =
        make_report(name, one_point_normalization(m, pn, v.normalization_hbar), 1.0, v.normalization_tolerance);
    r.resolution["hbar"] = v.normalization_hbar;
    out.checks.push_back(r);
  }

  io::json j;
  j["reports"] = io::json::array();
  for (const CheckReport& r : out.checks) j["reports"].push_back(io::to_json(r));
  j["semiclassical"] = rows;
  emit(out, "reports.json", dump(j));
}

} // namespace detail

/// Runs the configured experiment. Configuration problems raise validation_error;
/// numerical failures are captured in RunResult::failure with whatever artifacts
/// were produced so far plus failure.json.
inline RunResult run_experiment(const RunConfig& c) {
  RunResult out;
  try {
    if (c.experiment == "gas")
      detail::run_gas(c, out);
    else if (c.experiment == "grow")
      detail::run_grow(c, out);
    else if (c.experiment == "evolve")
      detail::run_evolve(c, out);
    else if (c.experiment == "universality")
      detail::run_universality(c, out);
    else if (c.experiment == "verify-all")
      detail::run_verify(c, out);
    else
      throw validation_error("unknown experiment '" + c.experiment + "'");
  } catch (const validation_error&) {
    throw;
  } catch (const io_error&) {
    throw;
  } catch (const error& e) {
    out.failure = e.what();
    io::json fj;
    fj["error"] = e.what();
    fj["experiment"] = c.experiment;
    detail::emit(out, "failure.json", detail::dump(fj));
  }
  detail::emit(out, "summary.csv", io::summary_csv(out.checks));
  return out;
}

} // namespace lglab

#endif
