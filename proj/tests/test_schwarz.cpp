#include <gtest/gtest.h>

#include "lglab/moments.hpp"
#include "lglab/schwarz.hpp"

using namespace lglab;

namespace {
const Potential p = uniform_potential(0.01);
const LaurentMap ellipse{1.0, {0.0, 0.2}};
} // namespace

TEST(Schwarz, DiskClosedForm) {
  // A = (|z|^2 - 1) / 2 - log|z| for the unit disk, on both sides of the circle
  const SchwarzPotential sp(LaurentMap::disk(1.0), p);
  for (double r : {0.8, 0.95, 1.0, 1.01, 1.1, 2.0})
    for (double phi : {0.0, 1.0, 2.5, -2.0}) {
      const double expected = 0.5 * (r * r - 1.0) - std::log(r);
      EXPECT_NEAR(sp.a_w(std::polar(r, phi)), expected, 1e-14) << r << ' ' << phi;
    }
  EXPECT_NEAR(sp.a(cplx(1.1, 0.0)), 0.0096898, 1e-7);
  EXPECT_NEAR(sp.t0(), 1.0, 1e-15);
}

TEST(Schwarz, VanishesWithZeroGradientOnTheBoundary) {
  const SchwarzPotential sp(ellipse, p);
  const double h = 1e-5;
  for (double phi : {0.0, 0.7, 1.5708, 2.2, 3.9, 5.5}) {
    const cplx e = std::polar(1.0, phi);
    EXPECT_NEAR(sp.a_w(e), 0.0, 1e-13);
    const double radial = (sp.a_w((1.0 + h) * e) - sp.a_w((1.0 - h) * e)) / (2.0 * h);
    const double tangential = (sp.a_w(std::polar(1.0, phi + h)) - sp.a_w(std::polar(1.0, phi - h))) / (2.0 * h);
    EXPECT_NEAR(radial, 0.0, 1e-9);
    EXPECT_NEAR(tangential, 0.0, 1e-9);
  }
}

TEST(Schwarz, QuadraticGrowthWithBackgroundDensity) {
  // A(z + delta n) = sigma delta^2 + O(delta^3) on both sides, uniform and wedge backgrounds
  Potential wedge = p;
  wedge.background = Background::wedge(0.7);
  for (const Potential& pot : {p, wedge}) {
    const SchwarzPotential sp(ellipse, pot);
    const Boundary b = boundary_grid(ellipse, pot, 8);
    for (const BoundaryNode& n : b.nodes)
      for (double d : {1e-3, -1e-3}) {
        const cplx w = invert_map_near(ellipse, n.z + d * n.normal, std::polar(1.0, n.phi));
        EXPECT_NEAR(sp.a_w(w) / (n.sigma * d * d), 1.0, 5e-3) << pot.background.name();
      }
  }
}

TEST(Schwarz, ClosedFormMatchesRadialQuadrature) {
  const SchwarzPotential sp(LaurentMap{1.1, {cplx(0.05), cplx(0.15, 0.1), cplx(0.0, 0.08)}}, p);
  for (const cplx w : {cplx(1.05, 0.1), cplx(-0.3, 0.97), cplx(0.0, -1.2), cplx(0.93, -0.2)})
    EXPECT_NEAR(sp.a_w(w), sp.a_w_quadrature(w), 1e-13);
}

TEST(Schwarz, OmegaDerivativeIsTheSchwarzFunction) {
  const SchwarzPotential sp(ellipse, p);
  const cplx z(1.6, 0.5), h(1e-6, 0.0);
  const cplx fd = (sp.omega(z + h) - sp.omega(z - h)) / (2.0 * h);
  EXPECT_NEAR(std::abs(fd - sp.schwarz(z)), 0.0, 1e-8);
  EXPECT_NEAR(schwarz_potential(sp, z), 0.5 * std::norm(z) - generating_function(sp, z).real(), 1e-13);
}

TEST(Schwarz, SeriesAgreesWhereItConverges) {
  const MomentVector m = moments_from_map(ellipse, p, 44);
  const SchwarzPotential sp(ellipse, p);
  const SeriesGeneratingFunction series(m, cplx(1.2, 0.0));
  for (const cplx z : {cplx(2.0, 0.3), cplx(-1.5, 1.2), cplx(0.2, -1.8)}) {
    ASSERT_TRUE(series.valid_at(z));
    EXPECT_NEAR(series.a(z), sp.a(z), 1e-9);
  }
  EXPECT_THROW(series(cplx(0.1, 0.0)), accuracy_error);
}

TEST(Schwarz, RejectsInteriorPoints) {
  const SchwarzPotential sp(ellipse, p);
  EXPECT_THROW(sp.a(cplx(0.2, 0.1)), interior_point_error);
}
