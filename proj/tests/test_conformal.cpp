#include <gtest/gtest.h>

#include "lglab/conformal.hpp"
#include "oracles.hpp"

using namespace lglab;

namespace {
const LaurentMap ellipse{1.0, {0.0, 0.2}};
}

TEST(Conformal, EllipseBoundaryIsTheEllipse) {
  // z(e^{i phi}) = (1 + 0.2) cos phi + i (1 - 0.2) sin phi
  for (double phi : {0.0, 0.4, 1.3, 2.9, 4.4}) {
    const cplx z = eval_map(ellipse, std::polar(1.0, phi)).z;
    EXPECT_NEAR(z.real(), 1.2 * std::cos(phi), 1e-14);
    EXPECT_NEAR(z.imag(), 0.8 * std::sin(phi), 1e-14);
  }
}

TEST(Conformal, DerivativeMatchesFiniteDifference) {
  const LaurentMap m{1.3, {cplx(0.1, 0.05), cplx(0.2, -0.1), cplx(0.05, 0.02)}};
  const cplx w(1.2, 0.7), h(1e-6, 0.0);
  const cplx fd = (eval_map(m, w + h).z - eval_map(m, w - h).z) / (2.0 * h);
  EXPECT_NEAR(std::abs(eval_map(m, w).dz_dw - fd), 0.0, 1e-8);
}

TEST(Conformal, EvalMapRejectsPointsInsideTheUnitDisk) {
  EXPECT_THROW(eval_map(ellipse, cplx(0.5, 0.0)), domain_error);
  EXPECT_NO_THROW(eval_map_continued(ellipse, cplx(0.9, 0.0)));
}

TEST(Conformal, AreaFromCoefficientsMatchesPolygon) {
  const LaurentMap m{1.1, {cplx(0.05, 0.0), cplx(0.15, 0.1), cplx(0.0, 0.08)}};
  const auto mom = oracle::polygon_moments([&](double phi) { return eval_map(m, std::polar(1.0, phi)).z; }, 0);
  EXPECT_NEAR(area_from_coefficients(m), oracle::pi * mom[0].real(), 1e-8);
  EXPECT_NEAR(area_from_coefficients(ellipse), oracle::pi * 1.2 * 0.8, 1e-14);
}

TEST(Conformal, UnivalenceCertificateDetectsCusp) {
  // z = w + u w^{-2} has z' = 0 on the unit circle exactly when |u| = 1/2
  EXPECT_TRUE(certify_univalence(LaurentMap{1.0, {0.0, 0.0, 0.4}}).ok());
  EXPECT_FALSE(certify_univalence(LaurentMap{1.0, {0.0, 0.0, 0.6}}).ok());
  EXPECT_THROW(require_univalent(LaurentMap{1.0, {0.0, 0.0, 0.6}}), cusp_error);
  EXPECT_NEAR(certify_univalence(LaurentMap{1.0, {0.0, 0.0, 0.4}}).margin(1.0), 1.0 - 2.0 * 0.4, 1e-6);
}

TEST(Conformal, InverseMapRoundTrip) {
  for (const cplx w : {cplx(1.0, 0.0), cplx(1.3, 0.4), cplx(-2.0, 1.0), cplx(0.2, -1.1)}) {
    const cplx z = eval_map(ellipse, w).z;
    EXPECT_NEAR(std::abs(invert_map(ellipse, z) - w), 0.0, 1e-10);
  }
  EXPECT_THROW(invert_map(ellipse, cplx(0.1, 0.1)), interior_point_error);
}

TEST(Conformal, BoundaryGridGeometry) {
  const Potential p = uniform_potential(0.01);
  EXPECT_THROW(boundary_grid(ellipse, p, 3), validation_error);
  const Boundary b = boundary_grid(ellipse, p, 256);
  double perimeter = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    EXPECT_NEAR(std::abs(b[i].normal), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(b[i].tangent - cplx(0, 1) * b[i].normal), 0.0, 1e-14);
    EXPECT_NEAR(b[i].wprime_abs * std::abs(b[i].dz_dw), 1.0, 1e-14);
    perimeter += b.arc_weight(i);
  }
  // perimeter of the ellipse with semi-axes 1.2, 0.8: 4 a E(e)
  EXPECT_NEAR(perimeter, 6.346175835716236, 1e-10);
  // outward normal: points away from the origin at phi = 0
  EXPECT_NEAR(b[0].normal.real(), 1.0, 1e-14);
  EXPECT_NEAR(shoelace_area(boundary_grid(LaurentMap::disk(1.0), p, 4096)), oracle::pi, 2e-6);
}

TEST(Conformal, GreenFunction) {
  const LaurentMap disk = LaurentMap::disk(1.0);
  // disk: G(z, infinity) = -log|z|, G(z, z2) = log|(z - z2) / (1 - z conj z2)|
  EXPECT_NEAR(green(disk, cplx(2.0, 0.0), infinity), -std::log(2.0), 1e-14);
  EXPECT_NEAR(green(ellipse, cplx(1.2, 0.0), infinity), 0.0, 1e-12);
  const double g = green(ellipse, cplx(2.0, 1.0), cplx(-1.5, 0.5));
  EXPECT_NEAR(g, green(ellipse, cplx(-1.5, 0.5), cplx(2.0, 1.0)), 1e-12);
  EXPECT_LT(g, 0.0);
  EXPECT_THROW(green(ellipse, cplx(2.0, 1.0), cplx(2.0, 1.0)), domain_error);
  const Boundary b = boundary_grid(ellipse, uniform_potential(0.01), 64);
  // normal derivative of -log|w| at phi = 0, by finite difference along the normal
  const double h = 1e-6;
  const double fd = (green(ellipse, b[0].z + h * b[0].normal, infinity) - 0.0) / h;
  EXPECT_NEAR(green_normal_deriv_at_infinity(b, 0), fd, 1e-5);
}

TEST(Conformal, SchwarzFunctionIsConjugateOnTheCurve) {
  const Boundary b = boundary_grid(ellipse, uniform_potential(0.01), 32);
  for (const BoundaryNode& n : b.nodes) {
    EXPECT_NEAR(std::abs(schwarz_on_boundary(uniform_potential(0.01), n) - std::conj(n.z)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(reflected_map(ellipse, std::polar(1.0, n.phi)) - std::conj(n.z)), 0.0, 1e-14);
  }
}
