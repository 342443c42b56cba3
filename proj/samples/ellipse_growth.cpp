// Grows an ellipse by moment conservation and prints the boundary history as SVG.
#include <cstdio>
#include <iostream>

#include "lglab/growth.hpp"
#include "lglab/svg.hpp"

int main() {
  using namespace lglab;
  const Potential p = uniform_potential(0.01);
  const LaurentMap start{1.0, {0.0, 0.2}};
  const std::vector<GrowthStep> steps = evolve_classical(start, p, 0.0628, 50);

  std::vector<LaurentMap> frames{start};
  for (std::size_t i = 9; i < steps.size(); i += 10) frames.push_back(steps[i].after);
  std::cout << render_boundary_svg(frames);

  const GrowthStep& last = steps.back();
  std::fprintf(stderr, "area %.6f  t2 %.12f  r %.6f\n", area_from_coefficients(last.after),
               last.conserved_moments.exterior(2).real(), last.after.r);
}
