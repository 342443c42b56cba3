#ifndef LGLAB_CONFORMAL_HPP
#define LGLAB_CONFORMAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lglab/errors.hpp"
#include "lglab/potential.hpp"
#include "lglab/quadrature.hpp"
#include "lglab/types.hpp"

namespace lglab {

/// Exterior conformal map z(w) = r w + sum_{k=0}^{K-1} u_k w^{-k} from |w| > 1
/// onto the droplet exterior, normalized so that r is real and positive.
struct LaurentMap {
  double r = 1.0;
  std::vector<cplx> u;

  std::size_t order() const { return u.size(); }

  void validate() const {
    if (!(r > 0.0) || !std::isfinite(r)) throw validation_error("laurent map: r must be positive and finite");
    for (const cplx& c : u)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw validation_error("laurent map: coefficients must be finite");
  }

  cplx coefficient(std::size_t k) const { return k < u.size() ? u[k] : cplx{}; }

  static LaurentMap disk(double radius) { return LaurentMap{radius, {}}; }
};

/// Raised when a map loses univalence (a cusp forms on the boundary).
class cusp_error : public error {
public:
  cusp_error(const std::string& what, LaurentMap last_valid)
      : error(what), last_valid_(std::move(last_valid)) {}

  /// Last map known to be univalent when the failure was detected.
  const LaurentMap& last_valid() const noexcept { return last_valid_; }

private:
  LaurentMap last_valid_;
};

struct MapValue {
  cplx z;
  cplx dz_dw;
};

/// Map and derivative at any w != 0 (the Laurent series continues inside |w| < 1).
inline MapValue eval_map_continued(const LaurentMap& map, cplx w) {
  const cplx q = 1.0 / w;
  cplx s{0.0, 0.0};
  cplx ds{0.0, 0.0};
  for (std::size_t k = map.u.size(); k-- > 0;) {
    s = s * q + map.u[k];
    ds = ds * q + static_cast<double>(k) * map.u[k];
  }
  return {map.r * w + s, map.r - q * ds};
}

inline MapValue eval_map(const LaurentMap& map, cplx w) {
  if (std::abs(w) < 1.0 - 1e-14) throw domain_error("eval_map: |w| < 1 lies outside the map's domain");
  return eval_map_continued(map, w);
}

/// Second derivative d^2 z / d w^2.
inline cplx map_second_derivative(const LaurentMap& map, cplx w) {
  const cplx q = 1.0 / w;
  cplx acc{0.0, 0.0};
  for (std::size_t k = map.u.size(); k-- > 0;)
    acc = acc * q + static_cast<double>(k) * static_cast<double>(k + 1) * map.u[k];
  return q * q * acc;
}

/// Reflection conj(z(1 / conj w)) = r / w + sum conj(u_k) w^k. For the uniform
/// background this is the Schwarz function expressed in the w coordinate.
inline cplx reflected_map(const LaurentMap& map, cplx w) {
  cplx acc{0.0, 0.0};
  for (std::size_t k = map.u.size(); k-- > 0;) acc = acc * w + std::conj(map.u[k]);
  return map.r / w + acc;
}

/// pi * r^2 - pi * sum k |u_k|^2.
inline double area_from_coefficients(const LaurentMap& map) {
  double s = map.r * map.r;
  for (std::size_t k = 0; k < map.u.size(); ++k) s -= static_cast<double>(k) * std::norm(map.u[k]);
  return pi * s;
}

// ---------------------------------------------------------------------------
// Univalence

struct UnivalenceCertificate {
  double min_abs_derivative = 0.0; // min |z'(e^{i phi})| over the grid
  bool simple = false;             // discretized boundary has no self-intersection
  std::size_t grid = 0;

  bool ok() const { return simple && min_abs_derivative > 0.0; }
  /// min |z'| relative to the conformal radius.
  double margin(double r) const { return min_abs_derivative / r; }
};

namespace detail {

inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline bool segments_intersect(cplx p1, cplx p2, cplx q1, cplx q2) {
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

/// Sweep over x-extents; reports any crossing of non-adjacent polygon edges.
inline bool closed_polygon_self_intersects(const std::vector<cplx>& pts) {
  const std::size_t n = pts.size();
  if (n < 4) return false;
  struct Seg {
    double xmin, xmax, ymin, ymax;
    std::size_t i;
  };
  std::vector<Seg> segs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a = pts[i];
    const cplx b = pts[(i + 1) % n];
    segs[i] = {std::min(a.real(), b.real()), std::max(a.real(), b.real()), std::min(a.imag(), b.imag()),
               std::max(a.imag(), b.imag()), i};
  }
  std::sort(segs.begin(), segs.end(), [](const Seg& a, const Seg& b) { return a.xmin < b.xmin; });
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n && segs[b].xmin <= segs[a].xmax; ++b) {
      const std::size_t i = segs[a].i;
      const std::size_t j = segs[b].i;
      const std::size_t gap = i > j ? i - j : j - i;
      if (gap <= 1 || gap == n - 1) continue;
      if (segs[b].ymin > segs[a].ymax || segs[a].ymin > segs[b].ymax) continue;
      if (segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n])) return true;
    }
  }
  return false;
}

} // namespace detail

inline UnivalenceCertificate certify_univalence(const LaurentMap& map, std::size_t grid = 4096) {
  UnivalenceCertificate cert;
  cert.grid = grid;
  cert.min_abs_derivative = std::numeric_limits<double>::infinity();
  std::vector<cplx> pts(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    const double phi = two_pi * static_cast<double>(j) / static_cast<double>(grid);
    const MapValue mv = eval_map_continued(map, std::polar(1.0, phi));
    pts[j] = mv.z;
    cert.min_abs_derivative = std::min(cert.min_abs_derivative, std::abs(mv.dz_dw));
  }
  cert.simple = !detail::closed_polygon_self_intersects(pts);
  return cert;
}

inline void require_univalent(const LaurentMap& map, std::size_t grid = 4096) {
  const UnivalenceCertificate cert = certify_univalence(map, grid);
  if (!cert.ok()) throw cusp_error("map is not univalent on |w| >= 1 (cusp or self-intersection)", map);
}

/// Winding number of the boundary curve z(e^{i phi}) around the point z.
inline int boundary_winding_number(const LaurentMap& map, cplx z, std::size_t grid = 2048) {
  double total = 0.0;
  cplx prev = eval_map_continued(map, cplx{1.0, 0.0}).z - z;
  for (std::size_t j = 1; j <= grid; ++j) {
    const double phi = two_pi * static_cast<double>(j) / static_cast<double>(grid);
    const cplx cur = eval_map_continued(map, std::polar(1.0, phi)).z - z;
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / two_pi));
}

// ---------------------------------------------------------------------------
// Inversion

struct NewtonInverse {
  cplx w;
  bool converged = false;
  int iterations = 0;
};

/// Damped Newton for z(w) = z from a seed, without constraining |w|.
inline NewtonInverse newton_invert(const LaurentMap& map, cplx z, cplx seed, double tol = 1e-12,
                                   int max_iter = 100) {
  const double tol_z = tol * std::max(1.0, std::abs(z));
  NewtonInverse out{seed, false, 0};
  cplx w = seed;
  MapValue mv = eval_map_continued(map, w);
  double res = std::abs(mv.z - z);
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it;
    if (res <= tol_z) {
      out.w = w;
      out.converged = true;
      return out;
    }
    if (mv.dz_dw == cplx{}) break;
    cplx step = (mv.z - z) / mv.dz_dw;
    bool improved = false;
    for (int halving = 0; halving < 40; ++halving) {
      const cplx trial = w - step;
      if (trial != cplx{}) {
        const MapValue tv = eval_map_continued(map, trial);
        const double tres = std::abs(tv.z - z);
        if (std::isfinite(tres) && tres < res) {
          w = trial;
          mv = tv;
          res = tres;
          improved = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  out.w = w;
  out.converged = res <= tol_z;
  return out;
}

/// Inverse map w(z) for z in the closure of the droplet exterior; |w| >= 1.
inline cplx invert_map(const LaurentMap& map, cplx z) {
  constexpr double unit_slack = 1e-12;
  const cplx seed = (z - map.coefficient(0)) / map.r;
  NewtonInverse first = newton_invert(map, z, seed == cplx{} ? cplx{1.0, 0.0} : seed);
  if (first.converged && std::abs(first.w) >= 1.0 - unit_slack) return first.w;

  // Fallback seeds along the ray through the nearest boundary node.
  constexpr std::size_t seeds = 256;
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < seeds; ++j) {
    const double phi = two_pi * static_cast<double>(j) / seeds;
    const double d = std::abs(eval_map_continued(map, std::polar(1.0, phi)).z - z);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  const double phi = two_pi * static_cast<double>(best) / seeds;
  const double dz_abs = std::abs(eval_map_continued(map, std::polar(1.0, phi)).dz_dw);
  for (double rho : {1.0 + best_d / std::max(dz_abs, 1e-300), 1.0 + 1e-6, 1.05, 1.25, 1.5, 2.0, 4.0}) {
    const NewtonInverse trial = newton_invert(map, z, std::polar(rho, phi));
    if (trial.converged && std::abs(trial.w) >= 1.0 - unit_slack) return trial.w;
  }
  if (boundary_winding_number(map, z) != 0) throw interior_point_error("invert_map: point lies inside the droplet");
  throw no_convergence_error("invert_map: Newton iteration failed for all seeds");
}

/// Inverse map continued slightly inside the droplet, seeded near a known w.
/// Used for points of a thin layer on either side of the boundary.
inline cplx invert_map_near(const LaurentMap& map, cplx z, cplx seed) {
  const NewtonInverse inv = newton_invert(map, z, seed);
  if (!inv.converged) throw no_convergence_error("invert_map_near: Newton iteration failed");
  return inv.w;
}

// ---------------------------------------------------------------------------
// Boundary discretization

struct BoundaryNode {
  double phi = 0.0;
  cplx z;
  cplx dz_dw;
  cplx normal;  // unit, pointing into the droplet exterior
  cplx tangent; // unit, counter-clockwise; tangent = i * normal
  double sigma = 1.0;
  double wprime_abs = 1.0; // |w'(z)| = 1 / |z'(w)|
};

struct Boundary {
  std::vector<BoundaryNode> nodes;

  std::size_t size() const { return nodes.size(); }
  const BoundaryNode& operator[](std::size_t i) const { return nodes[i]; }
  /// Arc-length element |z'(e^{i phi})| dphi of node i for the uniform grid.
  double arc_weight(std::size_t i) const {
    return std::abs(nodes[i].dz_dw) * two_pi / static_cast<double>(nodes.size());
  }
};

inline BoundaryNode boundary_node(const LaurentMap& map, const Potential& p, double phi) {
  const cplx w = std::polar(1.0, phi);
  const MapValue mv = eval_map_continued(map, w);
  BoundaryNode node;
  node.phi = phi;
  node.z = mv.z;
  node.dz_dw = mv.dz_dw;
  const double a = std::abs(mv.dz_dw);
  node.normal = w * mv.dz_dw / a;
  node.tangent = cplx{0.0, 1.0} * node.normal;
  node.wprime_abs = 1.0 / a;
  node.sigma = eval_sigma(p, mv.z);
  return node;
}

inline Boundary boundary_grid(const LaurentMap& map, const Potential& p, std::size_t n) {
  map.validate();
  if (n < 4) throw validation_error("boundary_grid: need at least 4 nodes");
  require_univalent(map, std::max<std::size_t>(n, 4096));
  Boundary b;
  b.nodes.reserve(n);
  for (std::size_t j = 0; j < n; ++j)
    b.nodes.push_back(boundary_node(map, p, two_pi * static_cast<double>(j) / static_cast<double>(n)));
  return b;
}

/// Twice the signed polygon area of the discretized boundary, halved.
inline double shoelace_area(const Boundary& b) {
  double s = 0.0;
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n; ++i) s += detail::cross(b.nodes[i].z, b.nodes[(i + 1) % n].z);
  return 0.5 * s;
}

// ---------------------------------------------------------------------------
// Green's function of the exterior Dirichlet problem

/// A point of the extended plane; std::nullopt stands for infinity.
using ExtendedPoint = std::optional<cplx>;
inline constexpr std::nullopt_t infinity = std::nullopt;

inline double green(const LaurentMap& map, cplx z, ExtendedPoint z2) {
  const cplx w1 = invert_map(map, z);
  if (!z2) return -std::log(std::abs(w1));
  if (*z2 == z) throw domain_error("green: coincident arguments");
  const cplx w2 = invert_map(map, *z2);
  return std::log(std::abs((w1 - w2) / (1.0 - w1 * std::conj(w2))));
}

/// Normal derivative of G(z, infinity) at a boundary node: -|w'(z)|.
inline double green_normal_deriv_at_infinity(const Boundary& b, std::size_t node_index) {
  if (node_index >= b.size()) throw validation_error("green_normal_deriv_at_infinity: node index out of range");
  return -b.nodes[node_index].wprime_abs;
}

// ---------------------------------------------------------------------------
// Schwarz function

/// S(z) = dU/dz on the boundary; equals conj(z) for the uniform background.
inline cplx schwarz_on_boundary(const Potential& p, const BoundaryNode& node) { return nonharmonic_du(p, node.z); }

/// Two-sided Laurent series of the Schwarz function built from harmonic moments:
///   S(z) = sum k t_k z^{k-1} + t0 / z + sum v_k z^{-k-1}.
/// It converges only outside the singularities of the interior part, so the
/// annulus of validity is reported empirically by inner_radius_estimate().
struct SchwarzSeries {
  std::vector<cplx> exterior_part; // exterior_part[k-1] = k t_k
  double t0 = 0.0;
  std::vector<cplx> interior_part; // interior_part[k-1] = v_k

  std::size_t order() const { return exterior_part.size(); }

  cplx operator()(cplx z) const {
    cplx outer{0.0, 0.0};
    for (std::size_t k = exterior_part.size(); k-- > 0;) outer = outer * z + exterior_part[k];
    const cplx q = 1.0 / z;
    cplx inner{0.0, 0.0};
    for (std::size_t k = interior_part.size(); k-- > 0;) inner = inner * q + interior_part[k];
    // outer = sum k t_k z^{k-1}; inner * q^2 = sum v_k z^{-k-1}
    return outer + t0 * q + inner * q * q;
  }

  cplx derivative(cplx z) const {
    cplx outer{0.0, 0.0};
    for (std::size_t k = exterior_part.size(); k-- > 1;)
      outer = outer * z + static_cast<double>(k) * exterior_part[k];
    const cplx q = 1.0 / z;
    cplx inner{0.0, 0.0};
    for (std::size_t k = interior_part.size(); k-- > 0;)
      inner = inner * q + static_cast<double>(k + 2) * interior_part[k];
    return outer - t0 * q * q - inner * q * q * q;
  }

  /// Root-test estimate of the radius inside which the interior part diverges,
  /// from the upper half of the stored coefficients.
  double inner_radius_estimate() const {
    double rho = 0.0;
    const std::size_t n = interior_part.size();
    for (std::size_t k = std::max<std::size_t>(1, n / 2); k <= n; ++k) {
      const double a = std::abs(interior_part[k - 1]);
      if (a > 0.0) rho = std::max(rho, std::pow(a, 1.0 / static_cast<double>(k)));
    }
    return rho;
  }
};

inline SchwarzSeries schwarz_series(const MomentVector& m) {
  m.validate();
  if (m.v.size() != m.t.size()) throw validation_error("schwarz_series: truncation mismatch between t_k and v_k");
  SchwarzSeries s;
  s.t0 = m.t0;
  s.exterior_part.resize(m.t.size());
  for (std::size_t k = 1; k <= m.t.size(); ++k) s.exterior_part[k - 1] = static_cast<double>(k) * m.t[k - 1];
  s.interior_part = m.v;
  return s;
}

} // namespace lglab

#endif
