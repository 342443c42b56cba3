#ifndef LGLAB_MOMENTS_HPP
#define LGLAB_MOMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lglab/conformal.hpp"
#include "lglab/errors.hpp"
#include "lglab/potential.hpp"
#include "lglab/types.hpp"

namespace lglab {

struct MomentQuadratureOptions {
  std::size_t initial_nodes = 0; // 0: chosen from the map order and k_max
  std::size_t max_nodes = 1u << 16;
  double tolerance = 1e-13; // relative change between two refinements
};

namespace detail {

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Trapezoid rule in the uniformizing angle for t0, t_k and v_k at a fixed node count.
inline MomentVector moments_at_resolution(const LaurentMap& map, std::size_t k_max, std::size_t n) {
  MomentVector m;
  m.t.assign(k_max, cplx{});
  m.v.assign(k_max, cplx{});
  cplx t0{0.0, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    const cplx w = std::polar(1.0, two_pi * static_cast<double>(j) / static_cast<double>(n));
    const MapValue mv = eval_map_continued(map, w);
    // zbar dz / (2 pi i) per node = zbar * w * z' / n
    const cplx base = std::conj(mv.z) * w * mv.dz_dw;
    t0 += base;
    const cplx zinv = 1.0 / mv.z;
    cplx zneg = base;
    cplx zpos = base;
    for (std::size_t k = 1; k <= k_max; ++k) {
      zneg *= zinv;
      zpos *= mv.z;
      m.t[k - 1] += zneg;
      m.v[k - 1] += zpos;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  m.t0 = t0.real() * inv_n;
  for (std::size_t k = 1; k <= k_max; ++k) {
    m.t[k - 1] *= inv_n / static_cast<double>(k);
    m.v[k - 1] *= inv_n;
  }
  return m;
}

inline double moment_distance(const MomentVector& a, const MomentVector& b) {
  double d = std::abs(a.t0 - b.t0);
  for (std::size_t k = 0; k < a.t.size(); ++k) d = std::max(d, std::abs(a.t[k] - b.t[k]));
  for (std::size_t k = 0; k < a.v.size(); ++k) d = std::max(d, std::abs(a.v[k] - b.v[k]));
  return d;
}

inline double moment_scale(const MomentVector& m) {
  double s = std::abs(m.t0);
  for (const cplx& c : m.t) s = std::max(s, std::abs(c));
  for (const cplx& c : m.v) s = std::max(s, std::abs(c));
  return std::max(s, 1.0);
}

// Entries below the refinement tolerance are not resolved; report them as zero
// so that series in z^k do not amplify quadrature noise.
inline MomentVector flush_unresolved(MomentVector m, double threshold) {
  for (cplx& c : m.t)
    if (std::abs(c) <= threshold) c = cplx{};
  for (cplx& c : m.v)
    if (std::abs(c) <= threshold) c = cplx{};
  return m;
}

} // namespace detail

/// Harmonic moments of the droplet bounded by z(e^{i phi}):
///   t0  = Area / pi
///   t_k = (1 / 2 pi i k) contour of conj(z) z^{-k} dz
///   v_k = (1 / 2 pi i)   contour of z^k conj(z) dz
/// evaluated by the periodic trapezoid rule and refined until two successive
/// grids agree.
inline MomentVector moments_from_map(const LaurentMap& map, const Potential& p, std::size_t k_max,
                                     const MomentQuadratureOptions& opts = {}) {
  map.validate();
  if (p.background.kind != BackgroundKind::uniform)
    throw validation_error("moments_from_map: only the uniform background is supported");
  require_univalent(map);
  if (boundary_winding_number(map, cplx{0.0, 0.0}) != 1)
    throw validation_error("moments_from_map: the origin must lie inside the droplet");

  std::size_t n = opts.initial_nodes != 0
                      ? opts.initial_nodes
                      : std::max<std::size_t>(256, detail::next_pow2(16 * (map.order() + k_max + 2)));
  MomentVector coarse = detail::moments_at_resolution(map, k_max, n);
  while (2 * n <= opts.max_nodes) {
    n *= 2;
    MomentVector fine = detail::moments_at_resolution(map, k_max, n);
    const double threshold = opts.tolerance * detail::moment_scale(fine);
    if (detail::moment_distance(coarse, fine) <= threshold) return detail::flush_unresolved(std::move(fine), threshold);
    coarse = std::move(fine);
  }
  throw accuracy_error("moments_from_map: quadrature did not converge under refinement");
}

struct InverseMomentOptions {
  int max_iterations = 50;
  double tolerance = 1e-10; // on max residual, relative to max(1, t0)
  std::size_t quadrature_nodes = 0; // 0: chosen from K
  bool certify = true;
};

struct InverseMomentResult {
  LaurentMap map;
  int iterations = 0;
  double residual = 0.0;
};

namespace detail {

inline Eigen::VectorXd pack_map(const LaurentMap& map, std::size_t K) {
  Eigen::VectorXd x(1 + 2 * K);
  x(0) = map.r;
  for (std::size_t k = 0; k < K; ++k) {
    const cplx c = map.coefficient(k);
    x(1 + 2 * k) = c.real();
    x(2 + 2 * k) = c.imag();
  }
  return x;
}

inline LaurentMap unpack_map(const Eigen::VectorXd& x, std::size_t K) {
  LaurentMap map;
  map.r = x(0);
  map.u.resize(K);
  for (std::size_t k = 0; k < K; ++k) map.u[k] = cplx{x(1 + 2 * k), x(2 + 2 * k)};
  return map;
}

/// Residual (t0 - t0*, Re/Im(t_k - t_k*)) for k = 1..K.
inline Eigen::VectorXd moment_residual(const Eigen::VectorXd& x, std::size_t K, std::size_t n,
                                       const MomentVector& target) {
  const LaurentMap map = unpack_map(x, K);
  const MomentVector m = moments_at_resolution(map, K, n);
  Eigen::VectorXd f(1 + 2 * K);
  f(0) = m.t0 - target.t0;
  for (std::size_t k = 1; k <= K; ++k) {
    const cplx d = m.t[k - 1] - target.exterior(k);
    f(2 * k - 1) = d.real();
    f(2 * k) = d.imag();
  }
  return f;
}

} // namespace detail

/// Solves the inverse moment problem: finds (r, u_0..u_{K-1}) whose droplet has
/// area moment t0 and exterior moments t_1..t_K (t_k = 0 beyond the input
/// truncation). Damped Newton with a central finite-difference Jacobian.
inline InverseMomentResult solve_inverse_moments(const MomentVector& m, std::size_t K,
                                                 const std::optional<LaurentMap>& guess = std::nullopt,
                                                 const InverseMomentOptions& opts = {}) {
  m.validate();
  if (K == 0) throw validation_error("map_from_moments: K must be positive");
  if (m.t.size() > K) throw validation_error("map_from_moments: K must be at least the moment truncation order");
  const std::size_t n = opts.quadrature_nodes != 0 ? opts.quadrature_nodes
                                                   : std::max<std::size_t>(512, detail::next_pow2(32 * (K + 2)));
  const LaurentMap start = guess ? *guess : LaurentMap::disk(std::sqrt(m.t0));
  start.validate();

  Eigen::VectorXd x = detail::pack_map(start, K);
  Eigen::VectorXd f = detail::moment_residual(x, K, n, m);
  double res = f.lpNorm<Eigen::Infinity>();
  const double tol = opts.tolerance * std::max(1.0, m.t0);
  const Eigen::Index dim = x.size();
  auto finish = [&](const Eigen::VectorXd& sol, int iterations) {
    InverseMomentResult out{detail::unpack_map(sol, K), iterations, res};
    if (opts.certify && !certify_univalence(out.map).ok())
      throw cusp_error("map_from_moments: solution is not univalent", start);
    return out;
  };

  for (int it = 0; it < opts.max_iterations; ++it) {
    if (res <= tol) return finish(x, it);
    Eigen::MatrixXd jac(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
      Eigen::VectorXd xp = x;
      Eigen::VectorXd xm = x;
      xp(i) += h;
      xm(i) -= h;
      jac.col(i) = (detail::moment_residual(xp, K, n, m) - detail::moment_residual(xm, K, n, m)) / (2.0 * h);
    }
    Eigen::VectorXd step = jac.colPivHouseholderQr().solve(f);
    if (!step.allFinite()) break;
    bool improved = false;
    for (int halving = 0; halving < 30; ++halving) {
      Eigen::VectorXd trial = x - step;
      if (trial(0) > 0.0) {
        Eigen::VectorXd ft = detail::moment_residual(trial, K, n, m);
        const double tres = ft.lpNorm<Eigen::Infinity>();
        if (std::isfinite(tres) && tres < res) {
          x = std::move(trial);
          f = std::move(ft);
          res = tres;
          improved = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  if (res <= tol) return finish(x, opts.max_iterations);
  throw no_convergence_error("map_from_moments: Newton iteration stagnated");
}

inline LaurentMap map_from_moments(const MomentVector& m, std::size_t K,
                                   const std::optional<LaurentMap>& guess = std::nullopt,
                                   const InverseMomentOptions& opts = {}) {
  return solve_inverse_moments(m, K, guess, opts).map;
}

} // namespace lglab

#endif
