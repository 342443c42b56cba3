#ifndef LGLAB_POTENTIAL_HPP
#define LGLAB_POTENTIAL_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lglab/errors.hpp"
#include "lglab/types.hpp"

namespace lglab {

enum class BackgroundKind { uniform, wedge, channel };

/// Background charge density sigma = d dbar U of the non-harmonic part U.
///
///   uniform:  U = |z|^2,               sigma = 1
///   wedge:    U = |z|^(2a) / a^2,      sigma = |z|^(2a-2)
///   channel:  U = (log |z|^2)^2 / 2,   sigma = |z|^(-2)
struct Background {
  BackgroundKind kind = BackgroundKind::uniform;
  double alpha = 1.0; // wedge exponent; ignored otherwise

  static Background uniform() { return {BackgroundKind::uniform, 1.0}; }
  static Background wedge(double alpha) { return {BackgroundKind::wedge, alpha}; }
  static Background channel() { return {BackgroundKind::channel, 1.0}; }

  /// True if sigma or U is singular at the origin.
  bool singular() const {
    return kind == BackgroundKind::channel || (kind == BackgroundKind::wedge && alpha != 1.0);
  }

  std::string name() const {
    switch (kind) {
      case BackgroundKind::uniform: return "uniform";
      case BackgroundKind::wedge: return "wedge";
      case BackgroundKind::channel: return "channel";
    }
    return "unknown";
  }
};

/// External potential W = -U + sum_k (t_k z^k + conj(t_k) conj(z)^k).
struct Potential {
  double hbar = 1.0;
  std::vector<cplx> couplings; // couplings[k-1] = t_k
  Background background = Background::uniform();
  double origin_cutoff = 1e-6;

  void validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw validation_error("potential: hbar must be positive and finite");
    if (!(origin_cutoff > 0.0) || !std::isfinite(origin_cutoff))
      throw validation_error("potential: origin_cutoff must be positive");
    if (background.kind == BackgroundKind::wedge && !(background.alpha > 0.0 && std::isfinite(background.alpha)))
      throw validation_error("potential: wedge alpha must be positive");
    for (const cplx& t : couplings)
      if (!std::isfinite(t.real()) || !std::isfinite(t.imag()))
        throw validation_error("potential: couplings must be finite");
  }
};

inline Potential uniform_potential(double hbar, std::vector<cplx> couplings = {}) {
  return Potential{hbar, std::move(couplings), Background::uniform(), 1e-6};
}

namespace detail {

inline void check_cutoff(const Background& bg, double cutoff, cplx z) {
  if (bg.singular() && std::abs(z) < cutoff)
    throw domain_error("point lies inside the origin cutoff of a singular background");
}

} // namespace detail

/// Non-harmonic part U(z, conj z).
inline double nonharmonic_u(const Background& bg, double cutoff, cplx z) {
  detail::check_cutoff(bg, cutoff, z);
  const double r2 = std::norm(z);
  switch (bg.kind) {
    case BackgroundKind::uniform: return r2;
    case BackgroundKind::wedge: return std::pow(r2, bg.alpha) / (bg.alpha * bg.alpha);
    case BackgroundKind::channel: {
      const double l = std::log(r2);
      return 0.5 * l * l;
    }
  }
  return 0.0;
}

inline double nonharmonic_u(const Potential& p, cplx z) { return nonharmonic_u(p.background, p.origin_cutoff, z); }

/// Holomorphic derivative d U / d z. On the droplet edge this is the Schwarz function.
inline cplx nonharmonic_du(const Background& bg, double cutoff, cplx z) {
  detail::check_cutoff(bg, cutoff, z);
  switch (bg.kind) {
    case BackgroundKind::uniform: return std::conj(z);
    case BackgroundKind::wedge: return std::pow(std::norm(z), bg.alpha) / (bg.alpha * z);
    case BackgroundKind::channel: return std::log(std::norm(z)) / z;
  }
  return {};
}

inline cplx nonharmonic_du(const Potential& p, cplx z) { return nonharmonic_du(p.background, p.origin_cutoff, z); }

inline double eval_sigma(const Background& bg, double cutoff, cplx z) {
  detail::check_cutoff(bg, cutoff, z);
  switch (bg.kind) {
    case BackgroundKind::uniform: return 1.0;
    case BackgroundKind::wedge: return std::pow(std::norm(z), bg.alpha - 1.0);
    case BackgroundKind::channel: return 1.0 / std::norm(z);
  }
  return 1.0;
}

inline double eval_sigma(const Potential& p, cplx z) { return eval_sigma(p.background, p.origin_cutoff, z); }

/// Harmonic part 2 Re sum_k t_k z^k.
inline double harmonic_part(const std::vector<cplx>& couplings, cplx z) {
  cplx acc{0.0, 0.0};
  for (std::size_t k = couplings.size(); k-- > 0;) acc = (acc + couplings[k]) * z;
  return 2.0 * acc.real();
}

inline double eval_potential(const Potential& p, cplx z) {
  return -nonharmonic_u(p, z) + harmonic_part(p.couplings, z);
}

/// Harmonic moments of a droplet: area moment t0, exterior moments t_k and
/// interior moments v_k, both indexed from k = 1 (t[k-1] = t_k).
struct MomentVector {
  double t0 = 0.0;
  std::vector<cplx> t;
  std::vector<cplx> v;
  std::optional<double> v0;

  std::size_t k_max() const { return t.size(); }

  void validate() const {
    if (!(t0 > 0.0) || !std::isfinite(t0)) throw validation_error("moments: t0 must be positive");
    if (!v.empty() && v.size() != t.size())
      throw validation_error("moments: exterior and interior sequences must share the truncation order");
  }

  /// t_k with t_k = 0 beyond the stored truncation.
  cplx exterior(std::size_t k) const { return (k >= 1 && k <= t.size()) ? t[k - 1] : cplx{}; }
  cplx interior(std::size_t k) const { return (k >= 1 && k <= v.size()) ? v[k - 1] : cplx{}; }
};

} // namespace lglab

#endif
