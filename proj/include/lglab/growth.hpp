#ifndef LGLAB_GROWTH_HPP
#define LGLAB_GROWTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lglab/conformal.hpp"
#include "lglab/errors.hpp"
#include "lglab/moments.hpp"
#include "lglab/parallel.hpp"
#include "lglab/potential.hpp"
#include "lglab/quadrature.hpp"
#include "lglab/rng.hpp"
#include "lglab/schwarz.hpp"
#include "lglab/types.hpp"

namespace lglab {

// ---------------------------------------------------------------------------
// Growth densities

/// log P(z) = -1/2 log(c_p hbar) + log|w'(z)| - 2 A(z) / hbar.
inline double one_point_logdensity(const SchwarzPotential& sp, double hbar, cplx z,
                                   double c_p = c_p_quasi_harmonic) {
  if (!(hbar > 0.0)) throw validation_error("one_point_logdensity: hbar must be positive");
  const cplx w = invert_map(sp.map(), z);
  const double site = -std::log(std::abs(eval_map(sp.map(), w).dz_dw)) - 2.0 * sp.a_w(w) / hbar;
  return -0.5 * std::log(c_p * hbar) + site;
}

/// log P(z_1..z_M) = -(M/2) log(c_p hbar) + 2 sum_{n<m} log|w_n - w_m| + sum_j [log|w'(z_j)| - 2 A(z_j)/hbar].
inline double joint_logdensity(const SchwarzPotential& sp, double hbar, const std::vector<cplx>& points,
                               double c_p = c_p_quasi_harmonic) {
  if (!(hbar > 0.0)) throw validation_error("joint_logdensity: hbar must be positive");
  if (points.empty()) throw validation_error("joint_logdensity: need at least one point");
  const std::size_t M = points.size();
  std::vector<cplx> w(M);
  double sites = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    w[j] = invert_map(sp.map(), points[j]);
    const double site = -std::log(std::abs(eval_map(sp.map(), w[j]).dz_dw)) - 2.0 * sp.a_w(w[j]) / hbar;
    sites = j == 0 ? site : sites + site;
  }
  double pairs = 0.0;
  for (std::size_t n = 0; n < M; ++n)
    for (std::size_t m = n + 1; m < M; ++m) {
      const double d = std::abs(w[n] - w[m]);
      if (d == 0.0) throw coincident_points_error("joint_logdensity: coincident points");
      pairs += 2.0 * std::log(d);
    }
  const double prefactor = -0.5 * static_cast<double>(M) * std::log(c_p * hbar);
  return M == 1 ? prefactor + sites : prefactor + pairs + sites;
}

// ---------------------------------------------------------------------------
// Layer sampler

struct LayerOptions {
  std::size_t sweeps = 400;
  double burn_in_fraction = 0.2;  // step sizes adapted during this part, then frozen
  double target_acceptance = 0.3;
  double tangential_step = 0.0;   // radians in the w plane; 0: pi / M
  double normal_step = 0.0;       // in |w|; 0: sqrt(hbar / (4 sigma)) / |z'|
  bool repulsion = true;          // false drops the Vandermonde factor (control ensembles)
  bool adapt = true;
};

struct LayerSample {
  std::vector<cplx> points; // z positions
  std::vector<cplx> w;      // their preimages, |w| > 1
  std::size_t M = 0;
  double hbar = 0.0;
  std::uint64_t seed = 0;
  std::size_t sweeps = 0;
  double acceptance_tangential = 0.0;
  double acceptance_normal = 0.0;
  double tangential_step = 0.0;
  double normal_step = 0.0;

  bool poor_mixing() const { return acceptance_tangential < 0.05 || acceptance_normal < 0.05; }
};

namespace detail {

struct LayerGeometry {
  double sigma_ref = 1.0;
  double dz_ref = 1.0;
};

inline LayerGeometry layer_geometry(const SchwarzPotential& sp) {
  const Boundary b = boundary_grid(sp.map(), sp.potential(), 256);
  double s = 0.0, d = 0.0;
  for (const auto& node : b.nodes) {
    s += node.sigma;
    d += std::abs(node.dz_dw);
  }
  return {s / static_cast<double>(b.size()), d / static_cast<double>(b.size())};
}

/// log density of one point in (rho, phi) coordinates of the w plane:
/// log|z'(w)| - 2 A / hbar + log rho.
inline double layer_site(const SchwarzPotential& sp, double hbar, cplx w) {
  const double rho = std::abs(w);
  return std::log(std::abs(eval_map(sp.map(), w).dz_dw)) - 2.0 * sp.a_w(w) / hbar + std::log(rho);
}

} // namespace detail

/// Metropolis chain for M growth points. State is kept in polar coordinates of
/// the w plane; tangential moves change arg w, normal moves change |w|, and
/// proposals with |w| <= 1 are rejected.
inline LayerSample sample_layer(const SchwarzPotential& sp, double hbar, std::size_t M, std::uint64_t seed,
                                const LayerOptions& opts = {}) {
  if (M == 0) throw validation_error("sample_layer: M must be positive");
  if (!(hbar > 0.0)) throw validation_error("sample_layer: hbar must be positive");
  const detail::LayerGeometry geo = detail::layer_geometry(sp);
  Rng rng(seed);

  double tstep = opts.tangential_step > 0.0 ? opts.tangential_step : pi / static_cast<double>(M);
  double nstep = opts.normal_step > 0.0 ? opts.normal_step : std::sqrt(hbar / (4.0 * geo.sigma_ref)) / geo.dz_ref;
  const double width = nstep;

  std::vector<double> rho(M), phi(M), site(M);
  const double phase = rng.uniform(0.0, two_pi);
  for (std::size_t j = 0; j < M; ++j) {
    phi[j] = opts.repulsion ? phase + two_pi * static_cast<double>(j) / static_cast<double>(M)
                            : rng.uniform(0.0, two_pi);
    phi[j] = std::fmod(phi[j], two_pi);
    rho[j] = 1.0 + std::abs(rng.normal()) * width;
    site[j] = detail::layer_site(sp, hbar, std::polar(rho[j], phi[j]));
  }

  std::vector<cplx> wpos(M);
  for (std::size_t j = 0; j < M; ++j) wpos[j] = std::polar(rho[j], phi[j]);

  auto pair_delta = [&](std::size_t i, cplx new_w) {
    if (!opts.repulsion) return 0.0;
    const cplx old_w = wpos[i];
    double d = 0.0;
    double ratio = 1.0;
    std::size_t pending = 0;
    for (std::size_t j = 0; j < M; ++j) {
      if (j == i) continue;
      ratio *= std::norm(new_w - wpos[j]) / std::norm(old_w - wpos[j]);
      if (++pending == 8) {
        d += std::log(ratio);
        ratio = 1.0;
        pending = 0;
      }
    }
    return d + std::log(ratio);
  };

  const std::size_t burn = static_cast<std::size_t>(opts.burn_in_fraction * static_cast<double>(opts.sweeps));
  std::size_t acc_t = 0, prop_t = 0, acc_n = 0, prop_n = 0;
  std::size_t win_acc_t = 0, win_prop_t = 0, win_acc_n = 0, win_prop_n = 0;

  for (std::size_t sweep = 0; sweep < opts.sweeps; ++sweep) {
    for (std::size_t step = 0; step < 2 * M; ++step) {
      const std::size_t i = rng.index(M);
      const bool tangential = (step % 2) == 0;
      double new_rho = rho[i];
      double new_phi = phi[i];
      if (tangential)
        new_phi = std::fmod(phi[i] + tstep * (2.0 * rng.uniform() - 1.0) + two_pi, two_pi);
      else
        new_rho = rho[i] + nstep * rng.normal();
      const double u = rng.uniform_open_low();
      bool accepted = false;
      if (new_rho > 1.0) {
        const cplx new_w = std::polar(new_rho, new_phi);
        const double new_site = detail::layer_site(sp, hbar, new_w);
        const double delta = new_site - site[i] + pair_delta(i, new_w);
        if (std::log(u) < delta) {
          wpos[i] = new_w;
          rho[i] = new_rho;
          phi[i] = new_phi;
          site[i] = new_site;
          accepted = true;
        }
      }
      if (tangential) {
        ++prop_t;
        ++win_prop_t;
        acc_t += accepted;
        win_acc_t += accepted;
      } else {
        ++prop_n;
        ++win_prop_n;
        acc_n += accepted;
        win_acc_n += accepted;
      }
    }
    if (opts.adapt && sweep < burn && (sweep + 1) % 10 == 0) {
      const double rt = static_cast<double>(win_acc_t) / static_cast<double>(std::max<std::size_t>(win_prop_t, 1));
      const double rn = static_cast<double>(win_acc_n) / static_cast<double>(std::max<std::size_t>(win_prop_n, 1));
      tstep = std::clamp(tstep * std::exp(rt - opts.target_acceptance), 1e-6, pi);
      nstep = std::clamp(nstep * std::exp(rn - opts.target_acceptance), 1e-3 * width, 1e3 * width);
      win_acc_t = win_prop_t = win_acc_n = win_prop_n = 0;
    }
    if (sweep + 1 == burn) acc_t = prop_t = acc_n = prop_n = 0;
  }

  LayerSample out;
  out.M = M;
  out.hbar = hbar;
  out.seed = seed;
  out.sweeps = opts.sweeps;
  out.acceptance_tangential = static_cast<double>(acc_t) / static_cast<double>(std::max<std::size_t>(prop_t, 1));
  out.acceptance_normal = static_cast<double>(acc_n) / static_cast<double>(std::max<std::size_t>(prop_n, 1));
  out.tangential_step = tstep;
  out.normal_step = nstep;
  out.w.resize(M);
  out.points.resize(M);
  for (std::size_t j = 0; j < M; ++j) {
    out.w[j] = wpos[j];
    out.points[j] = eval_map(sp.map(), out.w[j]).z;
  }
  return out;
}

/// Independent chains, member i seeded with derive_seed(seed, i).
inline std::vector<LayerSample> sample_layer_ensemble(const SchwarzPotential& sp, double hbar, std::size_t M,
                                                      std::size_t members, std::uint64_t seed,
                                                      const LayerOptions& opts = {}, unsigned jobs = 1) {
  std::vector<LayerSample> out(members);
  parallel_for(members, jobs, [&](std::size_t i) { out[i] = sample_layer(sp, hbar, M, derive_seed(seed, i), opts); });
  return out;
}

// ---------------------------------------------------------------------------
// Layer widths and Darcy's law

/// h_cl = (eps / (2 pi sigma)) |w'(z)| at a boundary node.
inline double classical_width(const Boundary& b, double eps, std::size_t node) {
  if (node >= b.size()) throw validation_error("classical_width: node index out of range");
  if (!(eps > 0.0)) throw validation_error("classical_width: eps must be positive");
  const BoundaryNode& n = b.nodes[node];
  return eps / (two_pi * n.sigma) * n.wprime_abs;
}

/// v_n = (eps_rate / (2 pi sigma)) |w'(z)| at a boundary node.
inline double classical_velocity(const Boundary& b, double eps_rate, std::size_t node) {
  return classical_width(b, eps_rate, node);
}

struct WidthBin {
  double phi_low = 0.0;
  double phi_high = 0.0;
  double mean_h = 0.0;            // hbar <count> / (sigma arc)
  double stderr = 0.0;            // over ensemble members
  double mean_displacement = 0.0; // mean (|w| - 1) |z'| of the points in the bin
  double classical_h = 0.0;       // arc-weighted h_cl over the bin for eps = M hbar
  std::size_t count = 0;
};

struct WidthHistogram {
  std::vector<WidthBin> bins;
  std::size_t members = 0;
  std::size_t empty_bins = 0;

  /// sum over bins of h sigma arc; equals M hbar for the count-based width.
  double collected_area = 0.0;
};

/// Bins the ensemble by the conformal foot point arg w(z); bin k is centered at
/// phi = 2 pi k / bins. The width of a bin is the collected area hbar * count
/// divided by sigma times the bin's arc length, averaged over members.
inline WidthHistogram layer_width_histogram(const std::vector<LayerSample>& ensemble, const Boundary& b,
                                            std::size_t bins) {
  if (ensemble.empty()) throw validation_error("layer_width_histogram: empty ensemble");
  if (bins == 0 || b.size() < 2 * bins) throw validation_error("layer_width_histogram: too few boundary nodes for the bins");
  const double hbar = ensemble.front().hbar;
  const double eps = hbar * static_cast<double>(ensemble.front().M);
  const double bin_width = two_pi / static_cast<double>(bins);
  const double dphi = two_pi / static_cast<double>(b.size());
  auto shifted = [&](double phi) {
    double psi = std::fmod(phi + 0.5 * bin_width, two_pi);
    if (psi < 0.0) psi += two_pi;
    return psi;
  };

  // sigma * arc and h_cl weights per bin; node i covers [phi_i - dphi/2, phi_i + dphi/2)
  std::vector<double> sigma_arc(bins, 0.0), hcl_weighted(bins, 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double lo = shifted(b.nodes[i].phi - 0.5 * dphi);
    const double weight = b.nodes[i].sigma * b.arc_weight(i);
    const double h = classical_width(b, eps, i);
    const std::size_t k0 = std::min(bins - 1, static_cast<std::size_t>(lo / bin_width));
    const double edge = static_cast<double>(k0 + 1) * bin_width;
    const double f0 = std::clamp((edge - lo) / dphi, 0.0, 1.0);
    const std::size_t k1 = (k0 + 1) % bins;
    sigma_arc[k0] += f0 * weight;
    hcl_weighted[k0] += f0 * weight * h;
    sigma_arc[k1] += (1.0 - f0) * weight;
    hcl_weighted[k1] += (1.0 - f0) * weight * h;
  }

  WidthHistogram out;
  out.members = ensemble.size();
  out.bins.resize(bins);
  std::vector<double> sum(bins, 0.0), sum2(bins, 0.0), disp(bins, 0.0);
  std::vector<std::size_t> total(bins, 0);
  std::vector<std::size_t> counts(bins);
  for (const LayerSample& s : ensemble) {
    std::fill(counts.begin(), counts.end(), 0);
    for (const cplx& w : s.w) {
      const double phi = std::arg(w);
      const std::size_t bin = std::min(bins - 1, static_cast<std::size_t>(shifted(phi) / bin_width));
      ++counts[bin];
      double node_phi = phi < 0.0 ? phi + two_pi : phi;
      const std::size_t node = static_cast<std::size_t>(std::lround(node_phi / dphi)) % b.size();
      disp[bin] += (std::abs(w) - 1.0) * std::abs(b.nodes[node].dz_dw);
    }
    for (std::size_t k = 0; k < bins; ++k) {
      const double h = hbar * static_cast<double>(counts[k]) / sigma_arc[k];
      sum[k] += h;
      sum2[k] += h * h;
      total[k] += counts[k];
    }
  }
  const double n = static_cast<double>(ensemble.size());
  for (std::size_t k = 0; k < bins; ++k) {
    WidthBin& wb = out.bins[k];
    wb.phi_low = (static_cast<double>(k) - 0.5) * bin_width;
    wb.phi_high = wb.phi_low + bin_width;
    wb.mean_h = sum[k] / n;
    const double var = n > 1.0 ? std::max(0.0, (sum2[k] - n * wb.mean_h * wb.mean_h) / (n - 1.0)) : 0.0;
    wb.stderr = std::sqrt(var / n);
    wb.count = total[k];
    wb.mean_displacement = total[k] > 0 ? disp[k] / static_cast<double>(total[k]) : 0.0;
    wb.classical_h = hcl_weighted[k] / sigma_arc[k];
    if (total[k] == 0) ++out.empty_bins;
    out.collected_area += wb.mean_h * sigma_arc[k];
  }
  return out;
}

struct DarcyReport {
  WidthHistogram histogram;
  double l2_error = 0.0; // sqrt(sum (h - h_cl)^2 / sum h_cl^2)
  std::size_t M = 0;
  double hbar = 0.0;
  std::size_t members = 0;
  std::uint64_t seed = 0;
  double mean_acceptance_tangential = 0.0;
  double mean_acceptance_normal = 0.0;
  std::size_t poor_mixing_members = 0;
};

struct DarcyOptions {
  std::size_t bins = 32;
  std::size_t boundary_nodes = 1024;
  LayerOptions layer;
  unsigned jobs = 1;
};

/// Darcy comparison for an existing ensemble.
inline DarcyReport darcy_report(const std::vector<LayerSample>& ensemble, const Boundary& b, std::size_t bins) {
  if (ensemble.empty()) throw validation_error("darcy_report: empty ensemble");
  DarcyReport rep;
  rep.histogram = layer_width_histogram(ensemble, b, bins);
  rep.M = ensemble.front().M;
  rep.hbar = ensemble.front().hbar;
  rep.members = ensemble.size();
  rep.seed = ensemble.front().seed;
  double num = 0.0, den = 0.0;
  for (const WidthBin& wb : rep.histogram.bins) {
    num += (wb.mean_h - wb.classical_h) * (wb.mean_h - wb.classical_h);
    den += wb.classical_h * wb.classical_h;
  }
  rep.l2_error = std::sqrt(num / den);
  for (const LayerSample& s : ensemble) {
    rep.mean_acceptance_tangential += s.acceptance_tangential;
    rep.mean_acceptance_normal += s.acceptance_normal;
    rep.poor_mixing_members += s.poor_mixing();
  }
  rep.mean_acceptance_tangential /= static_cast<double>(ensemble.size());
  rep.mean_acceptance_normal /= static_cast<double>(ensemble.size());
  return rep;
}

inline DarcyReport check_darcy_agreement(const LaurentMap& map, const Potential& p, double hbar, std::size_t M,
                                         std::size_t members, std::uint64_t seed, const DarcyOptions& opts = {}) {
  const SchwarzPotential sp(map, p);
  const Boundary b = boundary_grid(map, p, opts.boundary_nodes);
  DarcyReport rep = darcy_report(sample_layer_ensemble(sp, hbar, M, members, seed, opts.layer, opts.jobs), b, opts.bins);
  rep.seed = seed;
  return rep;
}

// ---------------------------------------------------------------------------
// Classical evolution

struct GrowthStep {
  LaurentMap before;
  LaurentMap after;
  double eps = 0.0;
  MomentVector conserved_moments; // measured on `after`
};

struct EvolveOptions {
  std::size_t K = 0;                  // map order of the evolved maps; 0: order of the initial map
  double invariant_tolerance = 1e-8;
  double cusp_margin = 0.1;           // min|z'|/r below which a failed solve is reported as a cusp
  InverseMomentOptions newton;
  std::function<void(const GrowthStep&)> on_step;
};

struct EvolveResult {
  std::vector<GrowthStep> steps;
  bool cusp = false;
  std::string stop_reason;
  LaurentMap last_valid;
};

/// Classical growth by moment conservation: each step raises t0 by eps / pi and
/// re-solves the inverse moment problem with all t_k held fixed, seeded at the
/// previous map. Stops at the first loss of univalence instead of throwing.
inline EvolveResult evolve_classical_until_cusp(const LaurentMap& map, const Potential& p, double eps,
                                                std::size_t n_steps, const EvolveOptions& opts = {}) {
  if (p.background.kind != BackgroundKind::uniform)
    throw validation_error("evolve_classical: only the uniform background is supported");
  if (!(eps > 0.0)) throw validation_error("evolve_classical: eps must be positive");
  map.validate();
  const std::size_t K = opts.K != 0 ? opts.K : std::max<std::size_t>(map.order(), 1);
  if (K < map.order()) throw validation_error("evolve_classical: K below the order of the initial map");
  LaurentMap current = map;
  current.u.resize(K);
  require_univalent(current);

  const MomentVector initial = moments_from_map(current, p, K);
  EvolveResult out;
  out.last_valid = current;
  for (std::size_t step = 0; step < n_steps; ++step) {
    MomentVector target = initial;
    target.t0 = moments_from_map(current, p, K).t0 + eps / pi;
    target.v.clear();
    LaurentMap next;
    try {
      next = map_from_moments(target, K, current, opts.newton);
    } catch (const cusp_error& e) {
      out.cusp = true;
      out.stop_reason = e.what();
      return out;
    } catch (const no_convergence_error& e) {
      if (certify_univalence(current).margin(current.r) < opts.cusp_margin) {
        out.cusp = true;
        out.stop_reason = std::string("cusp: ") + e.what();
        return out;
      }
      throw;
    }
    GrowthStep gs;
    gs.before = current;
    gs.after = next;
    gs.eps = eps;
    gs.conserved_moments = moments_from_map(next, p, K);
    const double d_area = area_from_coefficients(next) - area_from_coefficients(current);
    if (std::abs(d_area - eps) > opts.invariant_tolerance * std::max(1.0, eps))
      throw accuracy_error("evolve_classical: area increment differs from eps");
    for (std::size_t k = 1; k <= K; ++k)
      if (std::abs(gs.conserved_moments.exterior(k) - initial.exterior(k)) > opts.invariant_tolerance)
        throw accuracy_error("evolve_classical: exterior moment drifted");
    if (opts.on_step) opts.on_step(gs);
    out.steps.push_back(std::move(gs));
    current = next;
    out.last_valid = current;
  }
  return out;
}

/// As evolve_classical_until_cusp, but a cusp raises cusp_error carrying the last valid map.
inline std::vector<GrowthStep> evolve_classical(const LaurentMap& map, const Potential& p, double eps,
                                                std::size_t n_steps, const EvolveOptions& opts = {}) {
  EvolveResult r = evolve_classical_until_cusp(map, p, eps, n_steps, opts);
  if (r.cusp) throw cusp_error("evolve_classical: " + r.stop_reason, r.last_valid);
  return std::move(r.steps);
}

/// Droplet map for given moments by continuation from the disk, splitting the
/// t_k ramp into stages so each Newton solve starts close to its solution.
inline LaurentMap map_from_moments_continued(const MomentVector& m, std::size_t K, std::size_t stages = 8,
                                             const InverseMomentOptions& opts = {}) {
  std::optional<LaurentMap> guess;
  for (std::size_t s = 1; s <= stages; ++s) {
    MomentVector part = m;
    const double f = static_cast<double>(s) / static_cast<double>(stages);
    for (cplx& t : part.t) t *= f;
    part.v.clear();
    guess = map_from_moments(part, K, guess, opts);
  }
  return *guess;
}

} // namespace lglab

#endif
