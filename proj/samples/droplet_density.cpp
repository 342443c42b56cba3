// Samples N = 100 eigenvalues and prints the radial density next to the exact
// finite-N Ginibre value.
#include <cstdio>

#include "lglab/gas.hpp"

int main() {
  using namespace lglab;
  const double hbar = 0.01;
  const std::size_t N = 100;
  const auto snaps = gas_snapshots(uniform_potential(hbar), N, 10000, 10, 3);
  const RadialHistogram h = radial_density(snaps, 15, 1.5);

  std::printf("droplet radius %.4f (sqrt(N hbar) = 1)\n", droplet_radius(snaps));
  std::printf("  r      pi hbar rho   exact\n");
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double r = 0.5 * (h.r_low[k] + h.r_high[k]);
    std::printf("%5.2f   %8.4f   %8.4f\n", r, pi * hbar * h.density[k], pi * hbar * ginibre_mean_density(N, hbar, r));
  }
}
