#include <gtest/gtest.h>

#include "lglab/growth.hpp"
#include "lglab/moments.hpp"
#include "lglab/verify.hpp"
#include "oracles.hpp"

using namespace lglab;

namespace {
const Potential p = uniform_potential(0.01);
}

TEST(Moments, EllipseClosedForm) {
  // z = r w + u / w: t0 = r^2 - |u|^2, t2 = conj(u) / (2 r), all other t_k zero
  const LaurentMap m{1.0, {0.0, 0.2}};
  const MomentVector mv = moments_from_map(m, p, 4);
  EXPECT_NEAR(mv.t0, 0.96, 1e-12);
  EXPECT_NEAR(std::abs(mv.exterior(1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(mv.exterior(2) - cplx(0.1, 0.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(mv.exterior(3)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(mv.exterior(4)), 0.0, 1e-12);
}

TEST(Moments, MatchBruteForcePolygonQuadrature) {
  const LaurentMap m{1.1, {cplx(0.05, 0.0), cplx(0.15, 0.1), cplx(0.0, 0.08)}};
  const MomentVector mv = moments_from_map(m, p, 3);
  const auto ref = oracle::polygon_moments([&](double phi) { return eval_map(m, std::polar(1.0, phi)).z; }, 3);
  EXPECT_NEAR(mv.t0, ref[0].real(), 1e-8);
  for (int k = 1; k <= 3; ++k) EXPECT_NEAR(std::abs(mv.exterior(k) - ref[k]), 0.0, 1e-8) << k;
}

TEST(Moments, AreaIsPiT0) {
  const LaurentMap m{1.2, {cplx(0.0), cplx(0.1, 0.2)}};
  EXPECT_NEAR(area_from_coefficients(m), pi * moments_from_map(m, p, 2).t0, 1e-12);
}

TEST(Moments, RemeasureAgreesWithQuadrature) {
  const LaurentMap m{1.1, {cplx(0.05, 0.0), cplx(0.15, 0.1), cplx(0.0, 0.08)}};
  const MomentVector a = moments_from_map(m, p, 3);
  const MomentVector b = remeasure_moments(m, 3, 1024);
  EXPECT_NEAR(a.t0, b.t0, 1e-11);
  for (int k = 1; k <= 3; ++k) EXPECT_NEAR(std::abs(a.exterior(k) - b.exterior(k)), 0.0, 1e-11);
}

TEST(Moments, InverseProblemRoundTrip) {
  const LaurentMap m{1.05, {cplx(0.0), cplx(0.12, 0.05), cplx(0.03, -0.02)}};
  const MomentVector mv = moments_from_map(m, p, 3);
  const InverseMomentResult r = solve_inverse_moments(mv, 3, LaurentMap::disk(1.0));
  EXPECT_NEAR(r.map.r, m.r, 1e-10);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(std::abs(r.map.u[k] - m.u[k]), 0.0, 1e-10);
  EXPECT_LT(r.iterations, 20);
}

TEST(Moments, ContinuationFromTheDisk) {
  MomentVector mv;
  mv.t0 = 0.96;
  mv.t = {cplx(0.0), cplx(0.1)};
  const LaurentMap m = map_from_moments_continued(mv, 2);
  EXPECT_NEAR(m.r, 1.0, 1e-10);
  EXPECT_NEAR(std::abs(m.u[1] - cplx(0.2)), 0.0, 1e-10);
}

TEST(Moments, MomentsBeyondACuspHaveNoUnivalentMap) {
  // the t_k of z = w + 0.4 w^{-2} with t0 raised until the map would need |u_2| > r / 2
  const LaurentMap start{1.0, {0.0, 0.0, 0.4}};
  MomentVector mv = moments_from_map(start, p, 3);
  mv.t0 += 0.2;
  mv.v.clear();
  EXPECT_THROW(map_from_moments(mv, 3, start), error);
}

TEST(Moments, InvalidInput) {
  MomentVector mv;
  mv.t0 = -1.0;
  EXPECT_THROW(map_from_moments(mv, 2), validation_error);
  EXPECT_THROW(moments_from_map(LaurentMap{1.0, {0.0, 0.0, 0.6}}, p, 2), cusp_error);
}
