#include <gtest/gtest.h>

#include <regex>

#include "lglab/growth.hpp"
#include "lglab/svg.hpp"

using namespace lglab;

namespace {

std::vector<std::vector<cplx>> polygons(const std::string& svg) {
  std::vector<std::vector<cplx>> out;
  const std::regex poly("<polygon[^>]*points=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), poly); it != std::sregex_iterator(); ++it) {
    std::vector<cplx> pts;
    std::istringstream is((*it)[1].str());
    std::string pair;
    while (is >> pair) {
      const auto c = pair.find(',');
      pts.emplace_back(std::stod(pair.substr(0, c)), std::stod(pair.substr(c + 1)));
    }
    out.push_back(pts);
  }
  return out;
}

double area(const std::vector<cplx>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const cplx a = p[i], b = p[(i + 1) % p.size()];
    s += a.real() * b.imag() - a.imag() * b.real();
  }
  return std::abs(0.5 * s);
}

} // namespace

TEST(Svg, DiskIsACircleWithinViewportPrecision) {
  const std::string svg = render_boundary_svg(LaurentMap::disk(1.0));
  const auto polys = polygons(svg);
  ASSERT_EQ(polys.size(), 1u);
  ASSERT_GE(polys[0].size(), 512u);
  // viewport: 2 + 2 * 10% margin = 2.4 units over 800 px
  const double scale = 800.0 / 2.4;
  const cplx centre(400.0, 400.0);
  double worst = 0.0;
  for (const cplx& q : polys[0]) worst = std::max(worst, std::abs(std::abs(q - centre) / scale - 1.0));
  EXPECT_LT(worst * 2.4, 2.4 / 1e4);
  EXPECT_NE(svg.find("viewBox=\"0 0 800.0000 800.0000\""), std::string::npos);
}

TEST(Svg, EvolutionFramesAreNestedAndFadeIn) {
  const auto steps = evolve_classical(LaurentMap{1.0, {0.0, 0.2}}, uniform_potential(0.01), 0.3, 2);
  const std::vector<LaurentMap> frames{steps[0].before, steps[0].after, steps[1].after};
  const std::string svg = render_boundary_svg(frames);
  const auto polys = polygons(svg);
  ASSERT_EQ(polys.size(), 3u);
  EXPECT_LT(area(polys[0]), area(polys[1]));
  EXPECT_LT(area(polys[1]), area(polys[2]));
  const auto first = svg.find("stroke-opacity=\"0.2000\"");
  const auto last = svg.find("stroke-opacity=\"1.0000\"");
  ASSERT_NE(first, std::string::npos);
  ASSERT_NE(last, std::string::npos);
  EXPECT_LT(first, last);
}

TEST(Svg, DeterministicBytes) {
  SvgOptions o;
  o.points = {cplx(1.1, 0.2), cplx(-0.3, 0.95)};
  const LaurentMap m{1.0, {0.0, 0.2}};
  EXPECT_EQ(render_boundary_svg(m, o), render_boundary_svg(m, o));
  EXPECT_NE(render_boundary_svg(m, o).find("fill=\"#2a7f2a\""), std::string::npos);
}

TEST(Svg, EmptyDocumentIsAnError) { EXPECT_THROW(render_boundary_svg(std::vector<LaurentMap>{}), validation_error); }

TEST(Svg, CuspFlaggedMapGetsAMarker) {
  EXPECT_EQ(render_boundary_svg(LaurentMap{1.0, {0.0, 0.0, 0.3}}).find("cusp warning"), std::string::npos);
  EXPECT_NE(render_boundary_svg(LaurentMap{1.0, {0.0, 0.0, 0.5}}).find("cusp warning"), std::string::npos);
}

TEST(Svg, WidthOverlay) {
  const LaurentMap m{1.0, {0.0, 0.2}};
  const Boundary b = boundary_grid(m, uniform_potential(0.01), 16);
  SvgOptions o;
  for (std::size_t i = 0; i < b.size(); ++i) o.widths.push_back({b[i].z, b[i].normal, classical_width(b, 0.1, i)});
  const std::string svg = render_boundary_svg(m, o);
  std::size_t n = 0;
  for (auto pos = svg.find("#c05000"); pos != std::string::npos; pos = svg.find("#c05000", pos + 1)) ++n;
  EXPECT_EQ(n, 16u);
}
