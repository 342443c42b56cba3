// Independent reference computations used by the unit tests. Nothing here
// calls into the library's numerics.
#ifndef LGLAB_TESTS_ORACLES_HPP
#define LGLAB_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/gamma.hpp>

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = 3.14159265358979323846;

/// Gauss-Hermite rule for the weight exp(-x^2) by the Golub-Welsch eigenproblem.
struct Rule {
  std::vector<double> x, w;
};

inline Rule gauss_hermite(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) J(i, i - 1) = J(i - 1, i) = std::sqrt(i / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule r;
  for (int i = 0; i < n; ++i) {
    r.x.push_back(es.eigenvalues()(i));
    const double v = es.eigenvectors()(0, i);
    r.w.push_back(std::sqrt(pi) * v * v);
  }
  return r;
}

/// Exact fluctuation partition function of the disk of radius 1 (t0 = 1) by
/// Andreief's identity: the Gram matrix of monomials is diagonal and each entry
/// is a Gamma function,
///   Z = prod_{j<M} pi hbar^{-1/2} e^{1/hbar} hbar^{j+1+1/hbar} Gamma(j+1+1/hbar).
inline double disk_partition_function(int M, double hbar) {
  double log_z = 0.0;
  for (int j = 0; j < M; ++j) {
    const double a = j + 1.0 + 1.0 / hbar;
    log_z += std::log(pi) - 0.5 * std::log(hbar) + 1.0 / hbar + a * std::log(hbar) + std::lgamma(a);
  }
  return std::exp(log_z);
}

/// Mean density of N Ginibre eigenvalues with weight e^{-|z|^2/hbar}, via the
/// regularized upper incomplete gamma function.
inline double ginibre_density(int N, double hbar, double r) {
  return boost::math::gamma_q(static_cast<double>(N), r * r / hbar) / (pi * hbar);
}

/// One-point mean density of the N = 1 and N = 2 Ginibre ensembles by brute
/// force: Gauss-Hermite quadrature of the joint density over the other
/// eigenvalue and, for the normalization, over all four real coordinates.
inline double ginibre_density_bruteforce(int N, double hbar, cplx z) {
  const Rule gh = gauss_hermite(12);
  const double s = std::sqrt(hbar);
  auto weight = [&](cplx a) { return std::exp(-std::norm(a) / hbar); };
  if (N == 1) return weight(z) / (pi * hbar);
  // Z2 = integral |z1 - z2|^2 e^{-(|z1|^2 + |z2|^2)/hbar}; Gauss-Hermite is exact for the polynomial factor.
  double z2 = 0.0, marg = 0.0;
  for (std::size_t a = 0; a < gh.x.size(); ++a)
    for (std::size_t b = 0; b < gh.x.size(); ++b) {
      const cplx p(s * gh.x[a], s * gh.x[b]);
      const double wab = gh.w[a] * gh.w[b] * hbar;
      marg += wab * std::norm(z - p);
      for (std::size_t c = 0; c < gh.x.size(); ++c)
        for (std::size_t d = 0; d < gh.x.size(); ++d) {
          const cplx q(s * gh.x[c], s * gh.x[d]);
          z2 += wab * gh.w[c] * gh.w[d] * hbar * std::norm(p - q);
        }
    }
  return 2.0 * weight(z) * marg / z2;
}

/// Harmonic moments from a densely sampled boundary polygon, plain trapezoid
/// rule in z: t0 = area / pi, t_k = (1 / 2 pi i k) contour of conj(z) z^{-k} dz.
inline std::vector<cplx> polygon_moments(const std::function<cplx(double)>& curve, int k_max, int n = 200000) {
  std::vector<cplx> z(n);
  for (int j = 0; j < n; ++j) z[j] = curve(2.0 * pi * j / n);
  std::vector<cplx> out(k_max + 1, cplx{});
  for (int j = 0; j < n; ++j) {
    const cplx a = z[j], b = z[(j + 1) % n];
    for (int k = 0; k <= k_max; ++k)
      out[k] += 0.5 * (std::conj(a) * std::pow(a, -k) + std::conj(b) * std::pow(b, -k)) * (b - a);
  }
  const cplx two_pi_i(0.0, 2.0 * pi);
  out[0] = (out[0] / two_pi_i).real();
  for (int k = 1; k <= k_max; ++k) out[k] /= two_pi_i * static_cast<double>(k);
  return out;
}

/// Rejection sampler for the one-point layer density of the unit disk, in the
/// radial coordinate outside the droplet: p(r) proportional to r exp(-(r^2 - 1 - 2 log r)/hbar), r > 1.
/// Proposal: Gaussian around 1 of width 3 sqrt(hbar/4), envelope found on a grid.
inline std::vector<double> disk_layer_radii(double hbar, std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  const double s = 3.0 * std::sqrt(hbar / 4.0);
  std::normal_distribution<double> prop(1.0, s);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto target = [&](double r) { return r > 1.0 ? r * std::exp(-(r * r - 1.0 - 2.0 * std::log(r)) / hbar) : 0.0; };
  auto q = [&](double r) { return std::exp(-0.5 * (r - 1.0) * (r - 1.0) / (s * s)); };
  double envelope = 0.0;
  for (int i = 1; i < 20000; ++i) {
    const double r = 1.0 - 10.0 * s + 20.0 * s * i / 20000.0;
    envelope = std::max(envelope, target(r) / q(r));
  }
  envelope *= 1.05;
  std::vector<double> out;
  while (out.size() < n) {
    const double r = prop(gen);
    if (u(gen) * envelope * q(r) < target(r)) out.push_back(r);
  }
  return out;
}

/// CDF of the gap d = a2 - a1 mod 2 pi of the two-point CUE: (d - sin d) / (2 pi).
inline double cue2_gap_cdf(double d) { return (d - std::sin(d)) / (2.0 * pi); }

} // namespace oracle

#endif
