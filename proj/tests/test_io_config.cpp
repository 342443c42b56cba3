#include <gtest/gtest.h>

#include "lglab/config.hpp"
#include "lglab/io.hpp"

using namespace lglab;

TEST(Io, SeventeenDigitsRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 2.0 * pi * pi * pi, 1e-300, -7.25e12}) EXPECT_EQ(std::stod(io::fmt(x)), x);
}

TEST(Io, MapAndMomentsRoundTrip) {
  const LaurentMap m{1.25, {cplx(0.1, -0.2), cplx(0.0, 0.3)}};
  const LaurentMap back = io::map_from_json(io::to_json(m));
  EXPECT_EQ(back.r, m.r);
  EXPECT_EQ(back.u, m.u);
  MomentVector mv;
  mv.t0 = 0.96;
  mv.t = {cplx(0.0), cplx(0.1, 0.05)};
  const MomentVector mb = io::moments_from_json(io::to_json(mv));
  EXPECT_EQ(mb.t0, mv.t0);
  EXPECT_EQ(mb.t, mv.t);
}

TEST(Io, PotentialRoundTripAndValidation) {
  Potential p = uniform_potential(0.02, {cplx(0.0), cplx(0.1)});
  p.background = Background::wedge(0.7);
  const Potential back = io::potential_from_json(io::to_json(p));
  EXPECT_EQ(back.hbar, 0.02);
  EXPECT_EQ(back.background.kind, BackgroundKind::wedge);
  EXPECT_EQ(back.background.alpha, 0.7);
  EXPECT_EQ(back.couplings, p.couplings);
  EXPECT_THROW(io::potential_from_json(io::json::parse(R"({"background":"sphere"})")), validation_error);
  EXPECT_THROW(io::potential_from_json(io::json::parse(R"({"hbar":-1})")), validation_error);
  EXPECT_THROW(io::potential_from_json(io::json::parse(R"({"background":"uniform","alpha":2})")), validation_error);
}

TEST(Io, CsvShapes) {
  CheckReport r = make_report("a", 1.0, 1.0, 0.1);
  const std::string s = io::summary_csv({r});
  EXPECT_EQ(s.substr(0, s.find('\n')), "check,lhs,rhs,rel_error,tol,passed");
  EXPECT_NE(s.find("a,1,1,0,0.10000000000000001,true"), std::string::npos);
  EXPECT_EQ(io::points_csv({cplx(0.5, -0.25)}), "re,im\n0.5,-0.25\n");
}

TEST(Config, DefaultsAndOverrides) {
  const RunConfig c = parse_config_text(R"({"experiment":"gas","seed":9,"gas":{"N":50}})");
  EXPECT_EQ(c.experiment, "gas");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.gas.N, 50u);
  EXPECT_EQ(c.gas.sweeps, 20000u);
  EXPECT_EQ(c.droplet().r, 1.0);
}

TEST(Config, UnknownKeysRejectedAtEveryLevel) {
  for (const char* bad : {R"({"experiment":"gas","colour":1})",
                          R"({"experiment":"gas","gas":{"N":10,"temperature":1}})",
                          R"({"experiment":"grow","grow":{"Mm":10}})",
                          R"({"experiment":"evolve","evolve":{"epsilon":0.1}})",
                          R"({"experiment":"universality","universality":{"shapes":[{"id":"d","map":{"r":1},"x":0}]}})",
                          R"({"experiment":"verify-all","verify":{"stokes":1}})",
                          R"({"experiment":"gas","potential":{"hbar":0.1,"beta":2}})",
                          R"({"experiment":"gas","map":{"r":1,"v":[]}})",
                          R"({"experiment":"gas","moments":{"t0":1,"s":[]}})"})
    EXPECT_THROW(parse_config_text(bad), validation_error) << bad;
}

TEST(Config, SchemaErrors) {
  EXPECT_THROW(parse_config_text("{"), validation_error);
  EXPECT_THROW(parse_config_text(R"({"seed":1})"), validation_error);
  EXPECT_THROW(parse_config_text(R"({"experiment":"dance"})"), validation_error);
  EXPECT_THROW(parse_config_text(R"({"experiment":"gas","gas":{"N":"many"}})"), validation_error);
  EXPECT_THROW(parse_config_text(R"({"experiment":"gas","gas":{"N":-3}})"), validation_error);
  EXPECT_THROW(parse_config_text(R"({"experiment":"gas","map":{"r":1},"moments":{"t0":1}})"), validation_error);
  EXPECT_THROW(parse_config_text(R"({"experiment":"evolve","evolve":{"eps":0}})"), validation_error);
}

TEST(Config, MomentsSpecSolvedForMap) {
  const RunConfig c = parse_config_text(R"({"experiment":"evolve","moments":{"t0":0.96,"t":[0,0.1]}})");
  const LaurentMap m = c.droplet();
  EXPECT_NEAR(m.r, 1.0, 1e-10);
  EXPECT_NEAR(std::abs(m.u[1] - cplx(0.2)), 0.0, 1e-10);
}

TEST(Config, ExpandedConfigReparses) {
  const RunConfig c = parse_config_text(R"({"experiment":"grow","map":{"r":1,"u":[0,0.2]}})");
  io::json j = to_json(c);
  const RunConfig d = parse_config(j);
  EXPECT_EQ(to_json(d).dump(), j.dump());
}
