// Estimates the fluctuation partition function for two droplet shapes and
// compares them with c_p^{M/2}.
#include <cstdio>

#include "lglab/verify.hpp"

int main() {
  using namespace lglab;
  const double hbar = 0.02;
  const Potential p = uniform_potential(hbar);
  const LaurentMap disk = LaurentMap::disk(1.0);
  const LaurentMap ellipse{1.0, {0.0, 0.2}};

  const UniversalityReport a = partition_function_mc(disk, p, hbar, 2, 100000, 11, "disk");
  const UniversalityReport b = partition_function_mc(ellipse, p, hbar, 2, 100000, 12, "ellipse");
  std::printf("disk     Z = %.3f +- %.3f (ess %.0f)\n", a.Z_estimate, a.stderr, a.ess);
  std::printf("ellipse  Z = %.3f +- %.3f (ess %.0f)\n", b.Z_estimate, b.stderr, b.ess);
  std::printf("c_p      = %.4f\n", a.reference);
  std::printf("shapes differ by %.2f combined standard errors\n", combined_sigma_distance(a, b));
}
