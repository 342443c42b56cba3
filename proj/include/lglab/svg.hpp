#ifndef LGLAB_SVG_HPP
#define LGLAB_SVG_HPP

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "lglab/conformal.hpp"
#include "lglab/errors.hpp"
#include "lglab/types.hpp"

namespace lglab {

struct WidthMark {
  cplx z;       // boundary point
  cplx normal;  // unit outward normal
  double h = 0; // width drawn along the normal
};

struct SvgOptions {
  std::size_t nodes = 512;     // polyline vertices per curve (at least 512)
  double size = 800.0;         // pixels of the longer side
  std::vector<cplx> points;    // optional eigenvalue scatter
  std::vector<WidthMark> widths; // optional classical-width overlay
  double width_scale = 1.0;    // magnification of the overlay
};

namespace detail {

inline std::string svg_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

} // namespace detail

/// Deterministic SVG of one or more boundary curves, oldest frame lightest.
/// Frames that fail the univalence certificate get a red marker at the
/// node of smallest |z'| instead of being rejected.
inline std::string render_boundary_svg(const std::vector<LaurentMap>& frames, const SvgOptions& opts = {}) {
  if (frames.empty()) throw validation_error("render_boundary_svg: empty document (no frames)");
  const std::size_t n = std::max<std::size_t>(opts.nodes, 512);

  std::vector<std::vector<cplx>> curves;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto extend = [&](cplx z) {
    x0 = std::min(x0, z.real());
    x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag());
    y1 = std::max(y1, z.imag());
  };
  for (const LaurentMap& m : frames) {
    m.validate();
    std::vector<cplx> c(n);
    for (std::size_t j = 0; j < n; ++j) {
      c[j] = eval_map_continued(m, std::polar(1.0, two_pi * static_cast<double>(j) / static_cast<double>(n))).z;
      extend(c[j]);
    }
    curves.push_back(std::move(c));
  }
  for (const cplx& z : opts.points) extend(z);
  for (const WidthMark& w : opts.widths) extend(w.z + opts.width_scale * w.h * w.normal);

  const double span = std::max(x1 - x0, y1 - y0);
  const double margin = 0.1 * span;
  x0 -= margin;
  y0 -= margin;
  x1 += margin;
  y1 += margin;
  const double scale = opts.size / std::max(x1 - x0, y1 - y0);
  const double width = (x1 - x0) * scale, height = (y1 - y0) * scale;
  auto px = [&](cplx z) { return detail::svg_num((z.real() - x0) * scale) + "," + detail::svg_num((y1 - z.imag()) * scale); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::svg_num(width) << "\" height=\""
     << detail::svg_num(height) << "\" viewBox=\"0 0 " << detail::svg_num(width) << ' ' << detail::svg_num(height)
     << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t f = 0; f < curves.size(); ++f) {
    const double opacity = curves.size() == 1 ? 1.0 : 0.2 + 0.8 * static_cast<double>(f) / static_cast<double>(curves.size() - 1);
    os << "<polygon fill=\"none\" stroke=\"#1f3b73\" stroke-width=\"1.5\" stroke-opacity=\"" << detail::svg_num(opacity)
       << "\" points=\"";
    for (std::size_t j = 0; j < n; ++j) os << (j ? " " : "") << px(curves[f][j]);
    os << "\"/>\n";
    const UnivalenceCertificate cert = certify_univalence(frames[f]);
    if (!cert.ok() || cert.margin(frames[f].r) < 1e-3) {
      std::size_t worst = 0;
      double worst_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        const double d = std::abs(eval_map_continued(frames[f], std::polar(1.0, two_pi * static_cast<double>(j) / static_cast<double>(n))).dz_dw);
        if (d < worst_d) {
          worst_d = d;
          worst = j;
        }
      }
      const std::string p = px(curves[f][worst]);
      const auto comma = p.find(',');
      os << "<circle cx=\"" << p.substr(0, comma) << "\" cy=\"" << p.substr(comma + 1)
         << "\" r=\"6\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"><title>cusp warning</title></circle>\n";
    }
  }
  for (const WidthMark& w : opts.widths)
    os << "<polyline fill=\"none\" stroke=\"#c05000\" stroke-width=\"1\" points=\"" << px(w.z) << ' '
       << px(w.z + opts.width_scale * w.h * w.normal) << "\"/>\n";
  for (const cplx& z : opts.points) {
    const std::string p = px(z);
    const auto comma = p.find(',');
    os << "<circle cx=\"" << p.substr(0, comma) << "\" cy=\"" << p.substr(comma + 1) << "\" r=\"1.2\" fill=\"#2a7f2a\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline std::string render_boundary_svg(const LaurentMap& map, const SvgOptions& opts = {}) {
  return render_boundary_svg(std::vector<LaurentMap>{map}, opts);
}

} // namespace lglab

#endif
