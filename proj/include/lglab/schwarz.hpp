#ifndef LGLAB_SCHWARZ_HPP
#define LGLAB_SCHWARZ_HPP

#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "lglab/conformal.hpp"
#include "lglab/errors.hpp"
#include "lglab/potential.hpp"
#include "lglab/quadrature.hpp"
#include "lglab/types.hpp"

namespace lglab {

/// Generating function Omega = integral of S dz and the modified Schwarz
/// potential A = U/2 - Re Omega of a droplet, evaluated in the w coordinate of
/// its exterior map.
///
/// The Schwarz function is continued off the curve through the map itself,
/// S(z(w)) = dU/dz evaluated with conj(z) replaced by conj(z(1/conj w)). This is
/// the analytic continuation of the moment series but stays valid on the whole
/// curve, including where the series in z diverges.
///
/// Uniform background: Omega(w) = t0 log w + (Laurent polynomial in w), in closed form.
/// Other backgrounds: A(w) = [U(z(w)) - U(z(e^{i phi}))]/2 - Re of the radial
/// integral of S dz from e^{i phi} to w, by Gauss-Legendre quadrature.
///
/// The additive constant makes Re Omega = U/2 at the anchor w = 1, so A = 0 there.
class SchwarzPotential {
public:
  SchwarzPotential(LaurentMap map, Potential potential, std::size_t radial_nodes = 24)
      : map_(std::move(map)), potential_(std::move(potential)),
        radial_rule_(gauss_legendre(radial_nodes)) {
    map_.validate();
    potential_.validate();
    if (uniform()) build_closed_form();
    const cplx anchor{1.0, 0.0};
    const double u_anchor = nonharmonic_u(potential_, eval_map_continued(map_, anchor).z);
    if (uniform())
      constant_ = 0.5 * u_anchor - raw_omega_closed(anchor).real();
    else
      constant_ = 0.5 * u_anchor;
  }

  const LaurentMap& map() const noexcept { return map_; }
  const Potential& potential() const noexcept { return potential_; }
  bool uniform() const noexcept { return potential_.background.kind == BackgroundKind::uniform; }

  /// t0 of the droplet (coefficient of log w in Omega), uniform background.
  double t0() const noexcept { return log_coefficient_; }

  /// Schwarz function at z(w), for w near the unit circle (either side).
  cplx schwarz_w(cplx w) const {
    const cplx reflected = reflected_map(map_, w);
    if (uniform()) return reflected;
    const cplx z = eval_map_continued(map_, w).z;
    detail::check_cutoff(potential_.background, potential_.origin_cutoff, z);
    const cplx product = z * reflected; // equals |z|^2 on the curve
    switch (potential_.background.kind) {
      case BackgroundKind::wedge: {
        const double a = potential_.background.alpha;
        return std::pow(product, a) / (a * z);
      }
      case BackgroundKind::channel: return std::log(product) / z;
      default: return reflected;
    }
  }

  /// Omega at z(w). Principal branch of log w for the uniform background; for
  /// other backgrounds the path runs along the unit circle from w = 1 through
  /// arg w in (-pi, pi], then radially.
  cplx omega_w(cplx w) const {
    if (uniform()) return raw_omega_closed(w) + constant_;
    const double phi = std::arg(w);
    return constant_ + arc_integral(phi) + radial_integral(std::polar(1.0, phi), w);
  }

  /// A at z(w).
  double a_w(cplx w) const {
    const cplx z = eval_map_continued(map_, w).z;
    const double u = nonharmonic_u(potential_, z);
    if (uniform()) return 0.5 * u - (raw_omega_closed(w).real() + constant_);
    const cplx foot = w / std::abs(w);
    const double u_foot = nonharmonic_u(potential_, eval_map_continued(map_, foot).z);
    return 0.5 * (u - u_foot) - radial_integral(foot, w).real();
  }

  cplx omega(cplx z) const { return omega_w(invert_map(map_, z)); }
  double a(cplx z) const { return a_w(invert_map(map_, z)); }
  cplx schwarz(cplx z) const { return schwarz_w(invert_map(map_, z)); }

  /// Radial-quadrature value of A, available for every background. For the
  /// uniform background it is an independent route to a_w().
  double a_w_quadrature(cplx w) const {
    const cplx foot = w / std::abs(w);
    const cplx z = eval_map_continued(map_, w).z;
    const double u = nonharmonic_u(potential_, z);
    const double u_foot = nonharmonic_u(potential_, eval_map_continued(map_, foot).z);
    return 0.5 * (u - u_foot) - radial_integral(foot, w).real();
  }

private:
  void build_closed_form() {
    // S(w) z'(w) = (r/w + sum_j conj(u_j) w^j) (r - sum_k k u_k w^{-k-1})
    std::map<int, cplx> terms;
    const double r = map_.r;
    const std::size_t K = map_.u.size();
    terms[-1] += r * r;
    for (std::size_t k = 0; k < K; ++k) {
      const double kd = static_cast<double>(k);
      terms[-static_cast<int>(k) - 2] += -r * kd * map_.u[k];
      terms[static_cast<int>(k)] += r * std::conj(map_.u[k]);
    }
    for (std::size_t j = 0; j < K; ++j)
      for (std::size_t k = 0; k < K; ++k)
        terms[static_cast<int>(j) - static_cast<int>(k) - 1] +=
            -static_cast<double>(k) * std::conj(map_.u[j]) * map_.u[k];
    log_coefficient_ = terms[-1].real();
    lowest_power_ = -static_cast<int>(K);
    power_coefficients_.assign(2 * K + 1, cplx{});
    for (const auto& [p, c] : terms) {
      if (p == -1) continue;
      const int e = p + 1; // antiderivative exponent
      power_coefficients_[static_cast<std::size_t>(e - lowest_power_)] = c / static_cast<double>(e);
    }
  }

  cplx raw_omega_closed(cplx w) const {
    cplx acc{0.0, 0.0};
    // sum over exponents e in [lowest, -lowest], e != 0
    const cplx q = 1.0 / w;
    const std::size_t K = static_cast<std::size_t>(-lowest_power_);
    cplx neg{0.0, 0.0};
    for (std::size_t e = K; e >= 1; --e) neg = (neg + power_coefficients_[K - e]) * q;
    cplx pos{0.0, 0.0};
    for (std::size_t e = K; e >= 1; --e) pos = (pos + power_coefficients_[K + e]) * w;
    acc = neg + pos;
    return acc + log_coefficient_ * std::log(w);
  }

  /// Integral of S dz along the straight segment from w0 to w1 in the w plane.
  cplx radial_integral(cplx w0, cplx w1) const {
    const cplx d = w1 - w0;
    if (d == cplx{}) return {};
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < radial_rule_.nodes.size(); ++i) {
      const cplx w = w0 + 0.5 * (radial_rule_.nodes[i] + 1.0) * d;
      acc += radial_rule_.weights[i] * schwarz_w(w) * eval_map_continued(map_, w).dz_dw;
    }
    return 0.5 * d * acc;
  }

  /// Integral of S dz along the unit circle from angle 0 to phi.
  cplx arc_integral(double phi) const {
    if (phi == 0.0) return {};
    const std::size_t pieces = 8;
    cplx acc{0.0, 0.0};
    for (std::size_t piece = 0; piece < pieces; ++piece) {
      const double a = phi * static_cast<double>(piece) / pieces;
      const double b = phi * static_cast<double>(piece + 1) / pieces;
      const QuadratureRule rule = gauss_legendre(24, a, b);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const cplx w = std::polar(1.0, rule.nodes[i]);
        acc += rule.weights[i] * schwarz_w(w) * eval_map_continued(map_, w).dz_dw * cplx{0.0, 1.0} * w;
      }
    }
    return acc;
  }

  LaurentMap map_;
  Potential potential_;
  QuadratureRule radial_rule_;
  double constant_ = 0.0;
  double log_coefficient_ = 0.0;
  int lowest_power_ = 0;
  std::vector<cplx> power_coefficients_;
};

/// Omega(z) for a point of the droplet exterior.
inline cplx generating_function(const SchwarzPotential& sp, cplx z) { return sp.omega(z); }

/// A(z) = U/2 - Re Omega for a point of the droplet exterior.
inline double schwarz_potential(const SchwarzPotential& sp, cplx z) { return sp.a(z); }

/// Omega from the moment series, sum t_k z^k + t0 log z - sum (v_k / k) z^{-k} + C,
/// with C fixed by Re Omega = U/2 at the anchor point. Valid only where the
/// interior part of the series converges.
class SeriesGeneratingFunction {
public:
  SeriesGeneratingFunction(const MomentVector& m, cplx anchor, double validity_margin = 1.05)
      : moments_(m), series_(schwarz_series(m)) {
    inner_radius_ = series_.inner_radius_estimate() * validity_margin;
    check(anchor);
    constant_ = 0.5 * std::norm(anchor) - raw(anchor).real();
  }

  double inner_radius() const noexcept { return inner_radius_; }
  bool valid_at(cplx z) const noexcept { return std::abs(z) > inner_radius_; }

  cplx operator()(cplx z) const {
    check(z);
    return raw(z) + constant_;
  }

  double a(cplx z) const { return 0.5 * std::norm(z) - (*this)(z).real(); }

private:
  void check(cplx z) const {
    if (!valid_at(z)) throw accuracy_error("generating function series evaluated outside its annulus of convergence");
  }

  cplx raw(cplx z) const {
    cplx outer{0.0, 0.0};
    for (std::size_t k = moments_.t.size(); k-- > 0;) outer = (outer + moments_.t[k]) * z;
    const cplx q = 1.0 / z;
    cplx inner{0.0, 0.0};
    for (std::size_t k = moments_.v.size(); k-- > 0;) inner = (inner + moments_.v[k] / static_cast<double>(k + 1)) * q;
    return outer + moments_.t0 * std::log(z) - inner;
  }

  MomentVector moments_;
  SchwarzSeries series_;
  double inner_radius_ = 0.0;
  double constant_ = 0.0;
};

} // namespace lglab

#endif
