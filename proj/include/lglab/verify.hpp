#ifndef LGLAB_VERIFY_HPP
#define LGLAB_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lglab/conformal.hpp"
#include "lglab/errors.hpp"
#include "lglab/growth.hpp"
#include "lglab/parallel.hpp"
#include "lglab/potential.hpp"
#include "lglab/quadrature.hpp"
#include "lglab/rng.hpp"
#include "lglab/schwarz.hpp"
#include "lglab/stats.hpp"
#include "lglab/types.hpp"

namespace lglab {

struct CheckReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool near_zero = false; // judged on abs_error instead of rel_error
  bool passed = false;
  std::map<std::string, double> resolution;
  std::map<std::string, double> metrics;
  std::optional<std::uint64_t> seed;
};

/// Fills errors and the verdict; targets with |rhs| <= zero_threshold are judged on the absolute error.
inline CheckReport make_report(std::string name, double lhs, double rhs, double tolerance,
                               double zero_threshold = 1e-12) {
  CheckReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tolerance;
  r.abs_error = std::abs(lhs - rhs);
  r.rel_error = std::abs(rhs) > 0.0 ? r.abs_error / std::abs(rhs) : r.abs_error;
  r.near_zero = std::abs(rhs) <= zero_threshold;
  r.passed = r.near_zero ? r.abs_error <= tolerance : r.rel_error <= tolerance;
  return r;
}

// ---------------------------------------------------------------------------
// Schwarz function velocity

struct SchwarzVelocityOptions {
  std::size_t nodes = 64;
  double velocity_scale = 1.0; // != 1 for negative controls
  double tolerance = 1e-4;
};

/// Compares dS/dt at fixed z on the boundary with 2 sigma conj(v), v the normal
/// velocity vector, by central differences over consecutive maps. Uniform background.
inline CheckReport check_schwarz_velocity(const std::vector<LaurentMap>& maps, double dt,
                                          const SchwarzVelocityOptions& opts = {}) {
  if (maps.size() < 3) throw validation_error("check_schwarz_velocity: need at least three maps");
  if (!(dt > 0.0)) throw validation_error("check_schwarz_velocity: dt must be positive");
  double max_diff = 0.0, max_sdot = 0.0;
  for (std::size_t i = 1; i + 1 < maps.size(); ++i) {
    const LaurentMap& prev = maps[i - 1];
    const LaurentMap& cur = maps[i];
    const LaurentMap& next = maps[i + 1];
    for (std::size_t j = 0; j < opts.nodes; ++j) {
      const double phi = two_pi * static_cast<double>(j) / static_cast<double>(opts.nodes);
      const cplx w = std::polar(1.0, phi);
      const MapValue mv = eval_map(cur, w);
      const cplx z = mv.z;
      const cplx s_next = reflected_map(next, invert_map_near(next, z, w));
      const cplx s_prev = reflected_map(prev, invert_map_near(prev, z, w));
      const cplx sdot = (s_next - s_prev) / (2.0 * dt);
      const cplx v = (eval_map(next, w).z - eval_map(prev, w).z) / (2.0 * dt);
      const cplx normal = w * mv.dz_dw / std::abs(mv.dz_dw);
      const double vn = (v * std::conj(normal)).real() * opts.velocity_scale;
      const cplx rhs = 2.0 * vn * std::conj(normal);
      max_diff = std::max(max_diff, std::abs(sdot - rhs));
      max_sdot = std::max(max_sdot, std::abs(sdot));
    }
  }
  CheckReport r = make_report("schwarz_velocity", max_diff / max_sdot, 0.0, opts.tolerance, 0.0);
  r.lhs = max_sdot;
  r.rhs = max_sdot;
  r.abs_error = max_diff;
  r.rel_error = max_diff / max_sdot;
  r.near_zero = false;
  r.passed = r.rel_error <= opts.tolerance;
  r.resolution["nodes"] = static_cast<double>(opts.nodes);
  r.resolution["maps"] = static_cast<double>(maps.size());
  return r;
}

/// Maps of an evolution, including the initial one.
inline std::vector<LaurentMap> map_sequence(const std::vector<GrowthStep>& steps) {
  std::vector<LaurentMap> maps;
  if (steps.empty()) return maps;
  maps.push_back(steps.front().before);
  for (const GrowthStep& s : steps) maps.push_back(s.after);
  return maps;
}

// ---------------------------------------------------------------------------
// Expansion of A near the boundary

struct AExpansionOptions {
  std::size_t nodes = 16;
  std::vector<double> deltas{1e-2, 5e-3, 2.5e-3};
  double ratio_tolerance = 0.01;   // |A / (sigma delta^2) - 1| at the largest delta
  double min_exponent = 2.95;      // fitted order of A - sigma delta^2
};

/// A(z + delta n) against sigma delta^2 at boundary nodes. Reports the worst
/// ratio deviation at the largest delta and the smallest fitted residual exponent.
inline CheckReport check_a_expansion(const SchwarzPotential& sp, const AExpansionOptions& opts = {}) {
  if (opts.deltas.size() < 2) throw validation_error("check_a_expansion: need at least two deltas");
  const double delta_max = *std::max_element(opts.deltas.begin(), opts.deltas.end());
  double worst_ratio = 0.0;
  double worst_exponent = std::numeric_limits<double>::infinity();
  double ratio_at_worst = 1.0;
  for (std::size_t j = 0; j < opts.nodes; ++j) {
    const BoundaryNode node =
        boundary_node(sp.map(), sp.potential(), two_pi * static_cast<double>(j) / static_cast<double>(opts.nodes));
    std::vector<double> lx, ly;
    for (double d : opts.deltas) {
      const double a = sp.a(node.z + d * node.normal);
      const double q = node.sigma * d * d;
      if (d == delta_max) {
        const double dev = std::abs(a / q - 1.0);
        if (dev > worst_ratio) {
          worst_ratio = dev;
          ratio_at_worst = a / q;
        }
      }
      lx.push_back(std::log(d));
      ly.push_back(std::log(std::abs(a - q)));
    }
    worst_exponent = std::min(worst_exponent, stats::fit_slope(lx, ly));
  }
  CheckReport r = make_report("a_expansion", ratio_at_worst, 1.0, opts.ratio_tolerance);
  r.metrics["min_residual_exponent"] = worst_exponent;
  r.metrics["min_exponent_required"] = opts.min_exponent;
  r.passed = r.passed && worst_exponent >= opts.min_exponent;
  r.resolution["nodes"] = static_cast<double>(opts.nodes);
  r.resolution["delta_max"] = delta_max;
  return r;
}

// ---------------------------------------------------------------------------
// Layer / contour identity

struct StokesOptions {
  std::size_t angular_cells = 512;
  std::size_t depth_cells = 4;
  double tolerance = 1e-3;
  double zero_threshold = 1e-6; // contour side below this is a near-zero target
};

struct StokesTerms {
  double pair_term = 0.0;      // double layer integral of sigma log|w - w| sigma
  double potential_term = 0.0; // 2 * layer integral of sigma A
  double lhs = 0.0;
  double rhs = 0.0;
};

namespace detail {

/// Mean of log|x - y| for x, y independent and uniform on the parallelogram spanned by e1, e2.
inline double mean_log_distance(cplx e1, cplx e2) {
  // difference = a e1 + b e2 with density (1 - |a|)(1 - |b|) on [-1, 1]^2
  const QuadratureRule g = gauss_legendre(24, 0.0, 1.0);
  auto quadrant = [&](cplx f1, cplx f2) {
    // integral over [0,1]^2 of (1-a)(1-b) log|a f1 + b f2|, split on the diagonal (Duffy)
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double a = g.nodes[i];
      for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const double t = g.nodes[k];
        const double wgt = g.weights[i] * g.weights[k] * a;
        // b = a t (lower triangle) and the mirrored upper triangle with roles swapped
        s += wgt * (1.0 - a) * (1.0 - a * t) * (std::log(a) + std::log(std::abs(f1 + t * f2)));
        s += wgt * (1.0 - a) * (1.0 - a * t) * (std::log(a) + std::log(std::abs(t * f1 + f2)));
      }
    }
    return s;
  };
  return 2.0 * (quadrant(e1, e2) + quadrant(e1, -e2));
}

} // namespace detail

/// Both sides of the layer identity for the layer between two droplets:
///   lhs = double layer integral of sigma log|w(z) - w(zeta)| sigma - 2 layer integral of sigma A
///   rhs = Re double contour integral over the inner boundary of
///         dS(z) log(w(z) - w(zeta)) dS(zeta) dz dzeta / (2i)^2
/// The contour side keeps the principal part log|w - w|; its Fourier form is
///   rhs = -sum_{n>=1} Re[F(n) F(-n)] / n,  F(n) = integral of dS dz / (2i) e^{-i n alpha}.
inline StokesTerms stokes_terms(const LaurentMap& before, const LaurentMap& after, const Potential& p,
                                const StokesOptions& opts = {}) {
  if (p.background.kind != BackgroundKind::uniform)
    throw validation_error("check_stokes: only the uniform background is supported");
  const SchwarzPotential sp(before, p);
  const std::size_t na = opts.angular_cells, ns = opts.depth_cells;
  const double dphi = two_pi / static_cast<double>(na);
  const double ds = 1.0 / static_cast<double>(ns);

  struct Cell {
    cplx w;
    double mass;      // sigma * area
    double self_log;  // mean log|w - w| within the cell
  };
  std::vector<Cell> cells;
  cells.reserve(na * ns);
  double potential_term = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    const double phi = (static_cast<double>(a) + 0.5) * dphi;
    const cplx e = std::polar(1.0, phi);
    const MapValue vb = eval_map(before, e);
    const MapValue va = eval_map(after, e);
    for (std::size_t b = 0; b < ns; ++b) {
      const double s = (static_cast<double>(b) + 0.5) * ds;
      const cplx z = (1.0 - s) * vb.z + s * va.z;
      const cplx dz_dphi = cplx{0.0, 1.0} * e * ((1.0 - s) * vb.dz_dw + s * va.dz_dw);
      const cplx dz_ds = va.z - vb.z;
      const double area = std::abs((std::conj(dz_dphi) * dz_ds).imag()) * dphi * ds;
      const cplx w = invert_map_near(before, z, e);
      const double sigma = eval_sigma(p, z);
      const double wprime = 1.0 / std::abs(eval_map_continued(before, w).dz_dw);
      const double self_log = std::log(wprime) + detail::mean_log_distance(dz_dphi * dphi, dz_ds * ds);
      cells.push_back({w, sigma * area, self_log});
      potential_term += 2.0 * sigma * area * sp.a_w(w);
    }
  }
  double pair_term = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    pair_term += cells[i].mass * cells[i].mass * cells[i].self_log;
    double row = 0.0;
    for (std::size_t j = i + 1; j < cells.size(); ++j) row += cells[j].mass * std::log(std::abs(cells[i].w - cells[j].w));
    pair_term += 2.0 * cells[i].mass * row;
  }

  // contour side on the inner boundary
  const std::size_t n = 2 * na;
  std::vector<cplx> f(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double alpha = two_pi * static_cast<double>(j) / static_cast<double>(n);
    const cplx e = std::polar(1.0, alpha);
    const MapValue mv = eval_map(before, e);
    const cplx s_after = reflected_map(after, invert_map_near(after, mv.z, e));
    const cplx ds_val = s_after - std::conj(mv.z);
    f[j] = ds_val * mv.dz_dw * cplx{0.0, 1.0} * e / cplx{0.0, 2.0};
  }
  auto fourier = [&](long m) {
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j)
      acc += f[j] * std::polar(1.0, -static_cast<double>(m) * two_pi * static_cast<double>(j) / static_cast<double>(n));
    return acc * (two_pi / static_cast<double>(n));
  };
  double rhs = 0.0;
  for (long m = 1; m < static_cast<long>(n / 2); ++m) rhs -= (fourier(m) * fourier(-m)).real() / static_cast<double>(m);

  StokesTerms t;
  t.pair_term = pair_term;
  t.potential_term = potential_term;
  t.lhs = pair_term - potential_term;
  t.rhs = rhs;
  return t;
}

inline CheckReport check_stokes(const LaurentMap& before, const LaurentMap& after, const Potential& p,
                                const StokesOptions& opts = {}) {
  const StokesTerms t = stokes_terms(before, after, p, opts);
  CheckReport r = make_report("stokes", t.lhs, t.rhs, opts.tolerance, opts.zero_threshold);
  r.metrics["pair_term"] = t.pair_term;
  r.metrics["potential_term"] = t.potential_term;
  r.resolution["angular_cells"] = static_cast<double>(opts.angular_cells);
  r.resolution["depth_cells"] = static_cast<double>(opts.depth_cells);
  return r;
}

// ---------------------------------------------------------------------------
// Fluctuation partition function

struct PartitionOptions {
  double c_p = c_p_quasi_harmonic;
  double a_scale = 1.0;        // != 1 for the mis-specified-target control
  bool two_sided = true;       // integrate the layer on both sides of the boundary
  bool unordered = true;       // divide by M! (points are indistinguishable)
  std::size_t chunk = 1000;    // samples per random stream
  double min_ess_fraction = 0.01;
  unsigned jobs = 1;
};

struct UniversalityReport {
  std::string shape_id;
  std::size_t M = 0;
  double hbar = 0.0;
  double Z_estimate = 0.0;
  double stderr = 0.0;
  double reference = 0.0; // c_p^{M/2}
  double c_p_fitted = 0.0;
  double ess = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Importance-sampling estimate of
///   Z = (1/M!) integral of prod_{n<m} |w_n - w_m|^2 prod_j |w'(z_j)| hbar^{-1/2} e^{-2 A(z_j)/hbar} d^2 z_j
/// with a proposal that is uniform in arg w and Gaussian in |w| around the unit
/// circle, of width sqrt(hbar / (4 sigma)) / |z'| (half-Gaussian if one-sided).
inline UniversalityReport partition_function_mc(const LaurentMap& map, const Potential& p, double hbar, std::size_t M,
                                                std::size_t n_samples, std::uint64_t seed, std::string shape_id = "",
                                                const PartitionOptions& opts = {}) {
  if (M == 0 || n_samples < 2) throw validation_error("partition_function_mc: need M >= 1 and at least two samples");
  if (!(hbar > 0.0)) throw validation_error("partition_function_mc: hbar must be positive");
  const SchwarzPotential sp(map, p);
  const std::size_t chunks = (n_samples + opts.chunk - 1) / opts.chunk;
  std::vector<double> weights(n_samples);
  double log_mfact = 0.0;
  for (std::size_t k = 2; k <= M; ++k) log_mfact += std::log(static_cast<double>(k));
  const double log_norm_gauss = -0.5 * std::log(two_pi);

  parallel_for(chunks, opts.jobs, [&](std::size_t c) {
    Rng rng(derive_seed(seed, c));
    std::vector<cplx> w(M);
    const std::size_t begin = c * opts.chunk, end = std::min(n_samples, begin + opts.chunk);
    for (std::size_t s = begin; s < end; ++s) {
      double log_w = 0.0;
      for (std::size_t j = 0; j < M; ++j) {
        const double phi = rng.uniform(0.0, two_pi);
        const cplx e = std::polar(1.0, phi);
        const MapValue vb = eval_map(map, e);
        const double sigma = eval_sigma(p, vb.z);
        const double width = std::sqrt(hbar / (4.0 * sigma)) / std::abs(vb.dz_dw);
        const double xi = rng.normal();
        const double rho = 1.0 + width * (opts.two_sided ? xi : std::abs(xi));
        w[j] = std::polar(rho, phi);
        double log_q = -std::log(two_pi) + log_norm_gauss - 0.5 * xi * xi - std::log(width);
        if (!opts.two_sided) log_q += std::log(2.0);
        const double dz = std::abs(eval_map_continued(map, w[j]).dz_dw);
        const double log_f = std::log(dz) + std::log(rho) - 0.5 * std::log(hbar) -
                             2.0 * opts.a_scale * sp.a_w(w[j]) / hbar;
        log_w += log_f - log_q;
      }
      for (std::size_t n = 0; n < M; ++n)
        for (std::size_t m = n + 1; m < M; ++m) log_w += std::log(std::norm(w[n] - w[m]));
      if (opts.unordered) log_w -= log_mfact;
      weights[s] = std::exp(log_w);
    }
  });

  double sum = 0.0, sum2 = 0.0;
  for (double v : weights) {
    sum += v;
    sum2 += v * v;
  }
  UniversalityReport r;
  r.shape_id = std::move(shape_id);
  r.M = M;
  r.hbar = hbar;
  r.n_samples = n_samples;
  r.seed = seed;
  r.Z_estimate = sum / static_cast<double>(n_samples);
  r.stderr = stats::jackknife_stderr(weights);
  r.ess = sum * sum / sum2;
  r.reference = std::pow(opts.c_p, 0.5 * static_cast<double>(M));
  r.c_p_fitted = std::pow(r.Z_estimate, 2.0 / static_cast<double>(M));
  if (r.ess < opts.min_ess_fraction * static_cast<double>(n_samples))
    throw unreliable_estimate_error("partition_function_mc: effective sample size below threshold");
  return r;
}

/// Number of combined standard errors separating two estimates.
inline double combined_sigma_distance(const UniversalityReport& a, const UniversalityReport& b) {
  return std::abs(a.Z_estimate - b.Z_estimate) / std::hypot(a.stderr, b.stderr);
}

// ---------------------------------------------------------------------------
// One-point normalization and the exact finite-N oracle

struct NormalizationOptions {
  bool two_sided = true;
  std::size_t angular_nodes = 256;
  std::size_t radial_nodes = 96;
  double half_width = 12.0; // in units of the Gaussian layer width
  double c_p = c_p_quasi_harmonic;
};

/// Integral of the one-point density over the layer around the boundary, in the
/// w coordinate: (c_p hbar)^{-1/2} |z'(w)| e^{-2A/hbar} rho drho dphi.
inline double one_point_normalization(const LaurentMap& map, const Potential& p, double hbar,
                                      const NormalizationOptions& opts = {}) {
  const SchwarzPotential sp(map, p);
  const Boundary b = boundary_grid(map, p, opts.angular_nodes);
  double total = 0.0;
  for (const BoundaryNode& node : b.nodes) {
    const double width = std::sqrt(hbar / (4.0 * node.sigma)) / std::abs(node.dz_dw);
    const double lo = opts.two_sided ? std::max(1.0 - opts.half_width * width, 0.5) : 1.0;
    const double hi = 1.0 + opts.half_width * width;
    const QuadratureRule g = gauss_legendre(opts.radial_nodes, lo, hi);
    double radial = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const cplx w = std::polar(g.nodes[i], node.phi);
      radial += g.weights[i] * std::abs(eval_map_continued(map, w).dz_dw) * g.nodes[i] *
                std::exp(-2.0 * sp.a_w(w) / hbar);
    }
    total += radial;
  }
  return total * (two_pi / static_cast<double>(b.size())) / std::sqrt(opts.c_p * hbar);
}

/// log of |z|^{2N} e^{-|z|^2/hbar} / (pi hbar^{N+1} N!).
inline double exact_overlap_ginibre_log(std::size_t N, double hbar, cplx z) {
  const double r2 = std::norm(z);
  const double n = static_cast<double>(N);
  const double log_r2 = N == 0 ? 0.0 : std::log(r2);
  return n * log_r2 - r2 / hbar - std::log(pi) - (n + 1.0) * std::log(hbar) - std::lgamma(n + 1.0);
}

inline std::vector<double> exact_overlap_ginibre(std::size_t N, double hbar, const std::vector<cplx>& z_grid) {
  if (!(hbar > 0.0)) throw validation_error("exact_overlap_ginibre: hbar must be positive");
  std::vector<double> out;
  out.reserve(z_grid.size());
  for (const cplx& z : z_grid) out.push_back(std::exp(exact_overlap_ginibre_log(N, hbar, z)));
  return out;
}

/// Semiclassical one-point density of the disk of area pi t0, continued to
/// both sides of the circle: (2 pi^3 hbar)^{-1/2} r^{-1} e^{-2A/hbar} with
/// A = (|z|^2 - t0)/2 - t0 log(|z| / sqrt t0).
inline double semiclassical_disk_log(double t0, double hbar, double abs_z, double c_p = c_p_quasi_harmonic) {
  const double a = 0.5 * (abs_z * abs_z - t0) - t0 * std::log(abs_z / std::sqrt(t0));
  return -0.5 * std::log(c_p * hbar) - 0.5 * std::log(t0) - 2.0 * a / hbar;
}

struct SemiclassicalRow {
  std::size_t N = 0;
  double sup_rel_error = 0.0; // over |z| in [0.9, 1.1] sqrt(N hbar)
  double peak_ratio = 0.0;    // P_exact / P_semiclassical at |z| = sqrt(N hbar)
};

struct SemiclassicalReport {
  std::vector<SemiclassicalRow> rows;
  std::vector<SemiclassicalRow> control_rows; // t0 = N hbar / pi
  bool monotone = false;
  bool control_fails = false;
  CheckReport check;
};

inline SemiclassicalRow semiclassical_row(std::size_t N, double hbar, double t0, std::size_t grid) {
  SemiclassicalRow row;
  row.N = N;
  const double r = std::sqrt(static_cast<double>(N) * hbar);
  for (std::size_t i = 0; i <= grid; ++i) {
    const double abs_z = r * (0.9 + 0.2 * static_cast<double>(i) / static_cast<double>(grid));
    const double diff = exact_overlap_ginibre_log(N, hbar, cplx{abs_z, 0.0}) - semiclassical_disk_log(t0, hbar, abs_z);
    row.sup_rel_error = std::max(row.sup_rel_error, std::abs(std::expm1(-diff)));
  }
  row.peak_ratio = std::exp(exact_overlap_ginibre_log(N, hbar, cplx{r, 0.0}) - semiclassical_disk_log(t0, hbar, r));
  return row;
}

/// Sup relative error between the semiclassical and exact one-point densities,
/// |P_sc / P_exact - 1|, along N_list; passes if it decreases monotonically and
/// the mis-normalized control (t0 = N hbar / pi) is far off.
inline SemiclassicalReport semiclassical_vs_exact(const std::vector<std::size_t>& N_list, double hbar,
                                                  std::size_t grid = 400) {
  if (N_list.size() < 2) throw validation_error("semiclassical_vs_exact: need at least two values of N");
  SemiclassicalReport rep;
  for (std::size_t N : N_list) {
    rep.rows.push_back(semiclassical_row(N, hbar, static_cast<double>(N) * hbar, grid));
    rep.control_rows.push_back(semiclassical_row(N, hbar, static_cast<double>(N) * hbar / pi, grid));
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    rep.monotone = rep.monotone && rep.rows[i].sup_rel_error < rep.rows[i - 1].sup_rel_error;
  rep.control_fails = true;
  for (const auto& row : rep.control_rows) rep.control_fails = rep.control_fails && row.sup_rel_error > 0.5;
  rep.check = make_report("semiclassical_vs_exact", rep.rows.back().sup_rel_error, rep.rows.front().sup_rel_error, 1.0);
  rep.check.passed = rep.monotone && rep.control_fails;
  rep.check.metrics["first_sup_rel_error"] = rep.rows.front().sup_rel_error;
  rep.check.metrics["last_sup_rel_error"] = rep.rows.back().sup_rel_error;
  rep.check.resolution["grid"] = static_cast<double>(grid);
  return rep;
}

// ---------------------------------------------------------------------------
// Circular unitary ensemble comparison

struct CueReferenceOptions {
  std::size_t sweeps = 1000;
  double burn_in_fraction = 0.5;
};

/// Angles from independent Metropolis chains targeting prod_{n<m} |e^{i a_n} - e^{i a_m}|^2,
/// started from independent uniform angles.
inline std::vector<std::vector<double>> cue_reference(std::size_t M, std::size_t members, std::uint64_t seed,
                                                      const CueReferenceOptions& opts = {}, unsigned jobs = 1) {
  if (M == 0) throw validation_error("cue_reference: M must be positive");
  std::vector<std::vector<double>> out(members);
  parallel_for(members, jobs, [&](std::size_t m) {
    Rng rng(derive_seed(seed, m));
    std::vector<double> a(M);
    std::vector<cplx> e(M);
    for (std::size_t j = 0; j < M; ++j) {
      a[j] = rng.uniform(0.0, two_pi);
      e[j] = std::polar(1.0, a[j]);
    }
    double step = pi / static_cast<double>(M);
    const std::size_t burn = static_cast<std::size_t>(opts.burn_in_fraction * static_cast<double>(opts.sweeps));
    std::size_t acc = 0, prop = 0;
    for (std::size_t sweep = 0; sweep < opts.sweeps; ++sweep) {
      for (std::size_t k = 0; k < M; ++k) {
        const std::size_t i = rng.index(M);
        const double na = std::fmod(a[i] + step * (2.0 * rng.uniform() - 1.0) + two_pi, two_pi);
        const cplx ne = std::polar(1.0, na);
        const double u = rng.uniform_open_low();
        double delta = 0.0;
        double ratio = 1.0;
        std::size_t pending = 0;
        for (std::size_t j = 0; j < M; ++j) {
          if (j == i) continue;
          ratio *= std::norm(ne - e[j]) / std::norm(e[i] - e[j]);
          if (++pending == 8) {
            delta += std::log(ratio);
            ratio = 1.0;
            pending = 0;
          }
        }
        delta += std::log(ratio);
        ++prop;
        if (std::log(u) < delta) {
          a[i] = na;
          e[i] = ne;
          ++acc;
        }
      }
      if (sweep < burn && (sweep + 1) % 10 == 0) {
        step = std::clamp(step * std::exp(static_cast<double>(acc) / static_cast<double>(prop) - 0.3), 1e-6, pi);
        acc = prop = 0;
      }
    }
    out[m] = std::move(a);
  });
  return out;
}

namespace detail {

/// Gaps between circularly consecutive angles, scaled by the mean gap 2 pi / M.
inline std::vector<double> circular_gaps(std::vector<double> angles) {
  for (double& a : angles) {
    a = std::fmod(a, two_pi);
    if (a < 0.0) a += two_pi;
  }
  std::sort(angles.begin(), angles.end());
  const std::size_t M = angles.size();
  std::vector<double> g(M);
  const double scale = static_cast<double>(M) / two_pi;
  for (std::size_t j = 0; j + 1 < M; ++j) g[j] = (angles[j + 1] - angles[j]) * scale;
  g[M - 1] = (angles[0] + two_pi - angles[M - 1]) * scale;
  return g;
}

/// Variance over members of the number of angles in [0, arc).
inline double number_variance(const std::vector<std::vector<double>>& sets, double arc) {
  std::vector<double> counts;
  for (const auto& s : sets) {
    double c = 0.0;
    for (double a : s) {
      double x = std::fmod(a, two_pi);
      if (x < 0.0) x += two_pi;
      c += x < arc ? 1.0 : 0.0;
    }
    counts.push_back(c);
  }
  return stats::variance(counts);
}

} // namespace detail

/// One nearest-neighbour gap per member, following a point chosen uniformly
/// (deterministically from `seed`), so the pooled gaps are independent.
inline std::vector<double> sampled_gaps(const std::vector<std::vector<double>>& sets, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(sets.size());
  for (const auto& s : sets) {
    const std::vector<double> g = detail::circular_gaps(s);
    out.push_back(g[rng.index(g.size())]);
  }
  return out;
}

inline std::vector<std::vector<double>> layer_angles(const std::vector<LayerSample>& ensemble) {
  std::vector<std::vector<double>> out;
  out.reserve(ensemble.size());
  for (const LayerSample& s : ensemble) {
    std::vector<double> a;
    a.reserve(s.w.size());
    for (const cplx& w : s.w) a.push_back(std::arg(w));
    out.push_back(std::move(a));
  }
  return out;
}

struct CueOptions {
  CueReferenceOptions reference;
  std::size_t reference_members = 0; // 0: same as the ensemble
  double alpha = 0.05;
  unsigned jobs = 1;
};

/// Two-sample KS test of the nearest-neighbour gaps of arg w(z) against a CUE
/// reference chain; number variance on a quarter circle is reported alongside.
inline CheckReport cue_angular_statistics(const std::vector<LayerSample>& ensemble, std::size_t M, std::uint64_t seed,
                                          const CueOptions& opts = {}) {
  if (ensemble.empty()) throw validation_error("cue_angular_statistics: empty ensemble");
  for (const LayerSample& s : ensemble)
    if (s.w.size() != M) throw validation_error("cue_angular_statistics: ensemble members must have M points");
  const std::size_t n_ref = opts.reference_members != 0 ? opts.reference_members : ensemble.size();
  const auto sample_sets = layer_angles(ensemble);
  const auto ref_sets = cue_reference(M, n_ref, derive_seed(seed, 1), opts.reference, opts.jobs);
  const stats::KsResult ks = stats::ks_two_sample(sampled_gaps(sample_sets, derive_seed(seed, 2)),
                                                  sampled_gaps(ref_sets, derive_seed(seed, 3)));
  CheckReport r;
  r.name = "cue_angular_statistics";
  r.lhs = ks.statistic;
  r.rhs = 0.0;
  r.abs_error = ks.statistic;
  r.rel_error = ks.statistic;
  r.tolerance = opts.alpha;
  r.near_zero = true;
  r.passed = ks.p_value >= opts.alpha;
  r.metrics["ks_p_value"] = ks.p_value;
  r.metrics["number_variance_sample"] = detail::number_variance(sample_sets, 0.5 * pi);
  r.metrics["number_variance_reference"] = detail::number_variance(ref_sets, 0.5 * pi);
  r.resolution["members"] = static_cast<double>(ensemble.size());
  r.resolution["reference_members"] = static_cast<double>(n_ref);
  r.resolution["M"] = static_cast<double>(M);
  r.seed = seed;
  return r;
}

/// Two-point CUE density of the gap d = a_2 - a_1 mod 2 pi for M = 2: (1 - cos d) / (2 pi).
inline double cue_two_point_gap_density(double d) { return (1.0 - std::cos(d)) / two_pi; }

/// Independent re-measurement of t0 and t_k from boundary points alone: the
/// contour integrals are taken along the inscribed polygon with the midpoint
/// trapezoid rule, whose error expands in even powers of the spacing, and
/// Richardson-extrapolated over n, 2n, 4n nodes. No derivative of the map is used.
inline MomentVector remeasure_moments(const LaurentMap& map, std::size_t k_max, std::size_t n) {
  if (n < 8) throw validation_error("remeasure_moments: need at least 8 nodes");
  auto polygon = [&](std::size_t m) {
    std::vector<cplx> z(m);
    for (std::size_t j = 0; j < m; ++j)
      z[j] = eval_map_continued(map, std::polar(1.0, two_pi * static_cast<double>(j) / static_cast<double>(m))).z;
    std::vector<cplx> sums(k_max + 1, cplx{});
    for (std::size_t j = 0; j < m; ++j) {
      const cplx a = z[j], b = z[(j + 1) % m];
      const cplx dz = b - a;
      cplx fa = std::conj(a), fb = std::conj(b);
      sums[0] += 0.5 * (fa + fb) * dz;
      for (std::size_t k = 1; k <= k_max; ++k) {
        fa /= a;
        fb /= b;
        sums[k] += 0.5 * (fa + fb) * dz;
      }
    }
    return sums;
  };
  const auto s1 = polygon(n), s2 = polygon(2 * n), s4 = polygon(4 * n);
  MomentVector m;
  m.t.assign(k_max, cplx{});
  const cplx two_pi_i{0.0, two_pi};
  for (std::size_t k = 0; k <= k_max; ++k) {
    const cplx r12 = (4.0 * s2[k] - s1[k]) / 3.0;
    const cplx r24 = (4.0 * s4[k] - s2[k]) / 3.0;
    const cplx value = (16.0 * r24 - r12) / 15.0;
    if (k == 0)
      m.t0 = (value / two_pi_i).real();
    else
      m.t[k - 1] = value / (two_pi_i * static_cast<double>(k));
  }
  return m;
}

} // namespace lglab

#endif
