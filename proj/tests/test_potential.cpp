#include <gtest/gtest.h>

#include "lglab/potential.hpp"

using namespace lglab;

namespace {

// sigma = dd-bar U = Laplacian(U) / 4, by a five-point stencil
double laplacian_quarter(const Background& bg, cplx z, double h = 1e-4) {
  auto u = [&](cplx q) { return nonharmonic_u(bg, 1e-9, q); };
  const double lap = (u(z + h) + u(z - h) + u(z + cplx(0, h)) + u(z - cplx(0, h)) - 4.0 * u(z)) / (h * h);
  return lap / 4.0;
}

} // namespace

TEST(Potential, SigmaMatchesLaplacianOfU) {
  const std::vector<cplx> pts{{0.7, 0.2}, {-1.1, 0.4}, {0.3, -1.5}};
  for (const Background& bg : {Background::uniform(), Background::wedge(0.6), Background::wedge(1.7),
                               Background::channel()})
    for (const cplx& z : pts) EXPECT_NEAR(eval_sigma(bg, 1e-9, z), laplacian_quarter(bg, z), 2e-5) << bg.name();
}

TEST(Potential, UniformBackgroundIsUnitDensity) {
  EXPECT_DOUBLE_EQ(eval_sigma(Background::uniform(), 1e-6, cplx(3.0, -2.0)), 1.0);
  EXPECT_DOUBLE_EQ(nonharmonic_u(Background::uniform(), 1e-6, cplx(3.0, -2.0)), 13.0);
}

TEST(Potential, HarmonicPartIsTwiceRealPart) {
  const std::vector<cplx> t{{0.5, 0.0}, {0.1, 0.2}};
  const cplx z(0.3, 0.7);
  const double expected = 2.0 * (t[0] * z + t[1] * z * z).real();
  EXPECT_NEAR(harmonic_part(t, z), expected, 1e-15);
  Potential p = uniform_potential(0.1, t);
  EXPECT_NEAR(eval_potential(p, z), -std::norm(z) + expected, 1e-15);
}

TEST(Potential, GradientMatchesFiniteDifference) {
  // dU/dz = (U_x - i U_y) / 2
  const cplx z(0.8, -0.6);
  const double h = 1e-6;
  for (const Background& bg : {Background::uniform(), Background::wedge(0.5), Background::channel()}) {
    auto u = [&](cplx q) { return nonharmonic_u(bg, 1e-9, q); };
    const double ux = (u(z + h) - u(z - h)) / (2 * h);
    const double uy = (u(z + cplx(0, h)) - u(z - cplx(0, h))) / (2 * h);
    const cplx expected(0.5 * ux, -0.5 * uy);
    EXPECT_NEAR(std::abs(nonharmonic_du(bg, 1e-9, z) - expected), 0.0, 1e-8) << bg.name();
  }
}

TEST(Potential, SingularBackgroundsRejectTheOrigin) {
  EXPECT_THROW(eval_sigma(Background::channel(), 1e-6, cplx(1e-8, 0.0)), domain_error);
  EXPECT_THROW(nonharmonic_u(Background::wedge(0.5), 1e-6, cplx(0.0, 0.0)), domain_error);
  EXPECT_NO_THROW(eval_sigma(Background::uniform(), 1e-6, cplx(0.0, 0.0)));
}

TEST(Potential, ValidateRejectsBadInput) {
  Potential p = uniform_potential(0.01);
  p.hbar = 0.0;
  EXPECT_THROW(p.validate(), validation_error);
  p = uniform_potential(0.01);
  p.background = Background::wedge(-1.0);
  EXPECT_THROW(p.validate(), validation_error);
}

TEST(Potential, MomentVectorAccessors) {
  MomentVector m;
  m.t0 = 1.0;
  m.t = {cplx(0.0), cplx(0.1)};
  EXPECT_EQ(m.exterior(2), cplx(0.1));
  EXPECT_EQ(m.exterior(5), cplx(0.0));
  m.v = {cplx(1.0)};
  EXPECT_THROW(m.validate(), validation_error);
}
