#ifndef LGLAB_GAS_HPP
#define LGLAB_GAS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "lglab/errors.hpp"
#include "lglab/potential.hpp"
#include "lglab/rng.hpp"
#include "lglab/types.hpp"

namespace lglab {

/// 2 sum_{i<j} log|z_i - z_j| + (1/hbar) sum_j W(z_j).
inline double gas_logdensity(const Potential& p, const std::vector<cplx>& cfg) {
  if (cfg.empty()) throw validation_error("gas_logdensity: empty configuration");
  double pairs = 0.0;
  for (std::size_t i = 0; i < cfg.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.size(); ++j) {
      const double d = std::abs(cfg[i] - cfg[j]);
      if (d == 0.0) throw coincident_points_error("gas_logdensity: coincident points");
      pairs += 2.0 * std::log(d);
    }
  double field = 0.0;
  for (const cplx& z : cfg) field += eval_potential(p, z);
  return pairs + field / p.hbar;
}

struct GasOptions {
  double burn_in_fraction = 0.2;
  double target_acceptance = 0.3;
  std::size_t recompute_every = 1000; // micro-steps between full log-density recomputations
  double drift_tolerance = 1e-9;      // relative to max(1, |log density|)
  std::size_t observe_every = 1;      // sweeps between observer calls after burn-in
  std::function<void(const std::vector<cplx>&, std::size_t)> observer;
};

struct GasState {
  std::vector<cplx> points;
  Potential potential;
  std::uint64_t seed = 0;
  std::size_t sweeps_done = 0;
  double acceptance_rate = 0.0; // after burn-in
  double step_scale = 0.0;      // frozen value used after burn-in
  double max_drift = 0.0;       // largest incremental-vs-full discrepancy seen
  double log_density = 0.0;

  bool poor_mixing() const { return acceptance_rate < 0.05; }
};

/// Random-walk Metropolis for the N-point density of the normal matrix model.
/// One sweep is N single-particle moves; the step is adapted toward the target
/// acceptance during burn-in and frozen afterwards.
inline GasState sample_gas(const Potential& p, std::size_t N, std::size_t n_sweeps, std::uint64_t seed,
                           double step_scale = 0.0, const GasOptions& opts = {}) {
  p.validate();
  if (N == 0) throw validation_error("sample_gas: N must be positive");
  Rng rng(seed);
  const double spread = std::sqrt(static_cast<double>(N) * p.hbar);
  double step = step_scale > 0.0 ? step_scale : std::sqrt(p.hbar);

  std::vector<cplx> z(N);
  for (std::size_t j = 0; j < N; ++j) {
    z[j] = cplx{rng.normal(), rng.normal()} * (0.5 * spread);
    if (p.background.singular())
      while (std::abs(z[j]) < 10.0 * p.origin_cutoff) z[j] = cplx{rng.normal(), rng.normal()} * (0.5 * spread);
  }
  double logd = gas_logdensity(p, z);
  const double inv_hbar = 1.0 / p.hbar;

  const std::size_t burn = static_cast<std::size_t>(opts.burn_in_fraction * static_cast<double>(n_sweeps));
  std::size_t accepted = 0, proposed = 0, win_acc = 0, win_prop = 0;
  std::size_t micro = 0;
  GasState out;

  for (std::size_t sweep = 0; sweep < n_sweeps; ++sweep) {
    for (std::size_t m = 0; m < N; ++m) {
      const std::size_t i = rng.index(N);
      const cplx trial = z[i] + step * cplx{rng.normal(), rng.normal()};
      const double u = rng.uniform_open_low();
      bool ok = !(p.background.singular() && std::abs(trial) < p.origin_cutoff);
      double delta = 0.0;
      if (ok) {
        double ratio = 1.0;
        std::size_t pending = 0;
        for (std::size_t j = 0; j < N; ++j) {
          if (j == i) continue;
          ratio *= std::norm(trial - z[j]) / std::norm(z[i] - z[j]);
          if (++pending == 8) {
            delta += std::log(ratio);
            ratio = 1.0;
            pending = 0;
          }
        }
        delta += std::log(ratio);
        delta += (eval_potential(p, trial) - eval_potential(p, z[i])) * inv_hbar;
        ok = std::isfinite(delta) && std::log(u) < delta;
      }
      if (ok) {
        z[i] = trial;
        logd += delta;
        ++accepted;
        ++win_acc;
      }
      ++proposed;
      ++win_prop;
      if (++micro % opts.recompute_every == 0) {
        const double full = gas_logdensity(p, z);
        const double drift = std::abs(full - logd) / std::max(1.0, std::abs(full));
        out.max_drift = std::max(out.max_drift, drift);
        if (drift > opts.drift_tolerance) throw accuracy_error("sample_gas: incremental log density drifted");
        logd = full;
      }
    }
    if (sweep < burn && (sweep + 1) % 10 == 0) {
      const double rate = static_cast<double>(win_acc) / static_cast<double>(win_prop);
      step = std::clamp(step * std::exp(rate - opts.target_acceptance), 1e-6 * spread, 10.0 * spread);
      win_acc = win_prop = 0;
    }
    if (sweep + 1 == burn) accepted = proposed = 0;
    if (sweep >= burn && opts.observer && (sweep - burn) % opts.observe_every == 0) opts.observer(z, sweep);
  }

  out.points = std::move(z);
  out.potential = p;
  out.seed = seed;
  out.sweeps_done = n_sweeps;
  out.acceptance_rate = proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  out.step_scale = step;
  out.log_density = logd;
  return out;
}

/// Post-burn-in snapshots of one chain, every `thin` sweeps.
inline std::vector<GasState> gas_snapshots(const Potential& p, std::size_t N, std::size_t n_sweeps,
                                           std::size_t thin, std::uint64_t seed, double step_scale = 0.0) {
  std::vector<GasState> snaps;
  GasOptions opts;
  opts.observe_every = std::max<std::size_t>(thin, 1);
  opts.observer = [&](const std::vector<cplx>& pts, std::size_t sweep) {
    GasState s;
    s.points = pts;
    s.potential = p;
    s.seed = seed;
    s.sweeps_done = sweep + 1;
    snaps.push_back(std::move(s));
  };
  const GasState last = sample_gas(p, N, n_sweeps, seed, step_scale, opts);
  for (GasState& s : snaps) {
    s.acceptance_rate = last.acceptance_rate;
    s.step_scale = last.step_scale;
  }
  return snaps;
}

struct RadialHistogram {
  std::vector<double> r_low;
  std::vector<double> r_high;
  std::vector<double> density; // points per unit area, averaged over states
  std::vector<double> stderr;   // naive, treating states as independent

  std::size_t size() const { return density.size(); }
};

/// Area-normalized histogram of |z| on [0, r_max).
inline RadialHistogram radial_density(const std::vector<GasState>& states, std::size_t bins, double r_max) {
  if (states.empty()) throw validation_error("radial_density: no states");
  if (bins == 0 || !(r_max > 0.0)) throw validation_error("radial_density: need bins > 0 and r_max > 0");
  RadialHistogram h;
  h.r_low.resize(bins);
  h.r_high.resize(bins);
  h.density.assign(bins, 0.0);
  h.stderr.assign(bins, 0.0);
  std::vector<double> area(bins), sum2(bins, 0.0);
  for (std::size_t k = 0; k < bins; ++k) {
    h.r_low[k] = r_max * static_cast<double>(k) / static_cast<double>(bins);
    h.r_high[k] = r_max * static_cast<double>(k + 1) / static_cast<double>(bins);
    area[k] = pi * (h.r_high[k] * h.r_high[k] - h.r_low[k] * h.r_low[k]);
  }
  std::vector<std::size_t> counts(bins);
  for (const GasState& s : states) {
    std::fill(counts.begin(), counts.end(), 0);
    for (const cplx& z : s.points) {
      const double r = std::abs(z);
      if (r < r_max) ++counts[std::min(bins - 1, static_cast<std::size_t>(r / r_max * static_cast<double>(bins)))];
    }
    for (std::size_t k = 0; k < bins; ++k) {
      const double d = static_cast<double>(counts[k]) / area[k];
      h.density[k] += d;
      sum2[k] += d * d;
    }
  }
  const double n = static_cast<double>(states.size());
  for (std::size_t k = 0; k < bins; ++k) {
    h.density[k] /= n;
    const double var = n > 1.0 ? std::max(0.0, (sum2[k] / n - h.density[k] * h.density[k]) * n / (n - 1.0)) : 0.0;
    h.stderr[k] = std::sqrt(var / n);
  }
  return h;
}

/// Droplet radius from the second moment: a uniform disk of radius R has <|z|^2> = R^2 / 2.
inline double droplet_radius(const std::vector<GasState>& states) {
  if (states.empty()) throw validation_error("droplet_radius: no states");
  double s = 0.0;
  std::size_t n = 0;
  for (const GasState& st : states)
    for (const cplx& z : st.points) {
      s += std::norm(z);
      ++n;
    }
  return std::sqrt(2.0 * s / static_cast<double>(n));
}

/// Mean eigenvalue density of the finite-N Ginibre ensemble with weight e^{-|z|^2/hbar}:
/// sum_{k<N} |z|^{2k} e^{-|z|^2/hbar} / (pi hbar^{k+1} k!).
inline double ginibre_mean_density(std::size_t N, double hbar, double abs_z) {
  const double x = abs_z * abs_z / hbar;
  // sum_{k<N} x^k e^{-x} / k!, accumulated in log space for large x
  double total = 0.0;
  double log_term = -x;
  for (std::size_t k = 0; k < N; ++k) {
    if (k > 0) log_term += std::log(x) - std::log(static_cast<double>(k));
    total += std::exp(log_term);
  }
  return total / (pi * hbar);
}

} // namespace lglab

#endif
