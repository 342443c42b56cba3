#ifndef LGLAB_IO_HPP
#define LGLAB_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lglab/conformal.hpp"
#include "lglab/errors.hpp"
#include "lglab/gas.hpp"
#include "lglab/growth.hpp"
#include "lglab/potential.hpp"
#include "lglab/verify.hpp"

namespace lglab::io {

using json = nlohmann::ordered_json;

/// Shortest form that round-trips is not guaranteed by every printf; 17 significant digits always is.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline json complex_array(const std::vector<cplx>& v) {
  json a = json::array();
  for (const cplx& c : v) a.push_back(json::array({c.real(), c.imag()}));
  return a;
}

inline std::vector<cplx> parse_complex_array(const json& a, const char* what) {
  if (!a.is_array()) throw validation_error(std::string(what) + ": expected an array of [re, im] pairs");
  std::vector<cplx> out;
  for (const json& e : a) {
    if (e.is_number()) {
      out.emplace_back(e.get<double>(), 0.0);
      continue;
    }
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw validation_error(std::string(what) + ": expected [re, im] pairs");
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  if (!obj.is_object()) throw validation_error(std::string(where) + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw validation_error(std::string(where) + ": unknown key '" + it.key() + "'");
  }
}

// --- domain types ------------------------------------------------------------

inline json to_json(const MomentVector& m) {
  json j;
  j["t0"] = m.t0;
  j["t"] = complex_array(m.t);
  j["v"] = complex_array(m.v);
  if (m.v0) j["v0"] = *m.v0;
  return j;
}

inline MomentVector moments_from_json(const json& j) {
  reject_unknown_keys(j, {"t0", "t", "v", "v0"}, "moments");
  if (!j.contains("t0") || !j["t0"].is_number()) throw validation_error("moments: t0 is required");
  MomentVector m;
  m.t0 = j["t0"].get<double>();
  if (j.contains("t")) m.t = parse_complex_array(j["t"], "moments.t");
  if (j.contains("v")) m.v = parse_complex_array(j["v"], "moments.v");
  if (j.contains("v0")) m.v0 = j["v0"].get<double>();
  m.validate();
  return m;
}

inline json to_json(const LaurentMap& map) {
  json j;
  j["r"] = map.r;
  j["u"] = complex_array(map.u);
  return j;
}

inline LaurentMap map_from_json(const json& j) {
  reject_unknown_keys(j, {"r", "u"}, "map");
  if (!j.contains("r") || !j["r"].is_number()) throw validation_error("map: r is required");
  LaurentMap m;
  m.r = j["r"].get<double>();
  if (j.contains("u")) m.u = parse_complex_array(j["u"], "map.u");
  m.validate();
  return m;
}

inline json to_json(const Potential& p) {
  json j;
  j["hbar"] = p.hbar;
  j["background"] = p.background.name();
  if (p.background.kind == BackgroundKind::wedge) j["alpha"] = p.background.alpha;
  j["couplings"] = complex_array(p.couplings);
  j["origin_cutoff"] = p.origin_cutoff;
  return j;
}

inline Potential potential_from_json(const json& j) {
  reject_unknown_keys(j, {"hbar", "background", "alpha", "couplings", "origin_cutoff"}, "potential");
  Potential p;
  if (j.contains("hbar")) p.hbar = j["hbar"].get<double>();
  const std::string bg = j.value("background", std::string("uniform"));
  if (bg == "uniform")
    p.background = Background::uniform();
  else if (bg == "wedge")
    p.background = Background::wedge(j.value("alpha", 1.0));
  else if (bg == "channel")
    p.background = Background::channel();
  else
    throw validation_error("potential: unknown background '" + bg + "'");
  if (j.contains("alpha") && bg != "wedge") throw validation_error("potential: alpha applies to the wedge background only");
  if (j.contains("couplings")) p.couplings = parse_complex_array(j["couplings"], "potential.couplings");
  if (j.contains("origin_cutoff")) p.origin_cutoff = j["origin_cutoff"].get<double>();
  p.validate();
  return p;
}

inline json to_json(const CheckReport& r) {
  json j;
  j["name"] = r.name;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["abs_error"] = r.abs_error;
  j["rel_error"] = r.rel_error;
  j["tolerance"] = r.tolerance;
  j["near_zero"] = r.near_zero;
  j["passed"] = r.passed;
  j["resolution"] = json::object();
  for (const auto& [k, v] : r.resolution) j["resolution"][k] = v;
  j["metrics"] = json::object();
  for (const auto& [k, v] : r.metrics) j["metrics"][k] = v;
  if (r.seed) j["seed"] = *r.seed;
  return j;
}

inline json to_json(const UniversalityReport& r) {
  json j;
  j["shape_id"] = r.shape_id;
  j["M"] = r.M;
  j["hbar"] = r.hbar;
  j["Z_estimate"] = r.Z_estimate;
  j["stderr"] = r.stderr;
  j["reference"] = r.reference;
  j["c_p_fitted"] = r.c_p_fitted;
  j["ess"] = r.ess;
  j["n_samples"] = r.n_samples;
  j["seed"] = r.seed;
  return j;
}

inline json to_json(const DarcyReport& r) {
  json j;
  j["M"] = r.M;
  j["hbar"] = r.hbar;
  j["members"] = r.members;
  j["seed"] = r.seed;
  j["l2_error"] = r.l2_error;
  j["collected_area"] = r.histogram.collected_area;
  j["empty_bins"] = r.histogram.empty_bins;
  j["mean_acceptance_tangential"] = r.mean_acceptance_tangential;
  j["mean_acceptance_normal"] = r.mean_acceptance_normal;
  j["poor_mixing_members"] = r.poor_mixing_members;
  return j;
}

inline json to_json(const GrowthStep& s) {
  json j;
  j["eps"] = s.eps;
  j["area"] = area_from_coefficients(s.after);
  j["map"] = to_json(s.after);
  j["moments"] = to_json(s.conserved_moments);
  return j;
}

// --- CSV ---------------------------------------------------------------------

inline std::string boundary_csv(const Boundary& b) {
  std::ostringstream os;
  os << "phi,re_z,im_z,wprime_abs,sigma\n";
  for (const BoundaryNode& n : b.nodes)
    os << fmt(n.phi) << ',' << fmt(n.z.real()) << ',' << fmt(n.z.imag()) << ',' << fmt(n.wprime_abs) << ','
       << fmt(n.sigma) << '\n';
  return os.str();
}

inline std::string points_csv(const std::vector<cplx>& pts) {
  std::ostringstream os;
  os << "re,im\n";
  for (const cplx& z : pts) os << fmt(z.real()) << ',' << fmt(z.imag()) << '\n';
  return os.str();
}

inline std::string layer_csv(const std::vector<LayerSample>& ensemble) {
  std::ostringstream os;
  os << "sample_id,re,im\n";
  for (std::size_t i = 0; i < ensemble.size(); ++i)
    for (const cplx& z : ensemble[i].points) os << i << ',' << fmt(z.real()) << ',' << fmt(z.imag()) << '\n';
  return os.str();
}

inline std::string width_csv(const WidthHistogram& h) {
  std::ostringstream os;
  os << "phi_low,phi_high,mean_h,stderr\n";
  for (const WidthBin& b : h.bins)
    os << fmt(b.phi_low) << ',' << fmt(b.phi_high) << ',' << fmt(b.mean_h) << ',' << fmt(b.stderr) << '\n';
  return os.str();
}

inline std::string radial_csv(const RadialHistogram& h, std::size_t N, double hbar) {
  std::ostringstream os;
  os << "r_low,r_high,density,stderr,ginibre_exact\n";
  for (std::size_t k = 0; k < h.size(); ++k) {
    // bin average of the exact mean density, 16-point Gauss in r with area weight
    const QuadratureRule g = gauss_legendre(16, h.r_low[k], h.r_high[k]);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      num += g.weights[i] * g.nodes[i] * ginibre_mean_density(N, hbar, g.nodes[i]);
      den += g.weights[i] * g.nodes[i];
    }
    os << fmt(h.r_low[k]) << ',' << fmt(h.r_high[k]) << ',' << fmt(h.density[k]) << ',' << fmt(h.stderr[k]) << ','
       << fmt(num / den) << '\n';
  }
  return os.str();
}

inline std::string summary_csv(const std::vector<CheckReport>& reports) {
  std::ostringstream os;
  os << "check,lhs,rhs,rel_error,tol,passed\n";
  for (const CheckReport& r : reports)
    os << r.name << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << fmt(r.near_zero ? r.abs_error : r.rel_error)
       << ',' << fmt(r.tolerance) << ',' << (r.passed ? "true" : "false") << '\n';
  return os.str();
}

inline std::string maps_jsonl(const std::vector<GrowthStep>& steps, const LaurentMap& initial) {
  std::ostringstream os;
  json first;
  first["step"] = 0;
  first["area"] = area_from_coefficients(initial);
  first["map"] = to_json(initial);
  os << first.dump() << '\n';
  for (std::size_t i = 0; i < steps.size(); ++i) {
    json j = to_json(steps[i]);
    j["step"] = i + 1;
    os << j.dump() << '\n';
  }
  return os.str();
}

// --- files -------------------------------------------------------------------

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw io_error("cannot create directory " + path.parent_path().string());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw io_error("write failed for " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

} // namespace lglab::io

#endif
