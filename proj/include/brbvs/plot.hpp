// SVG bar charts of the selection frequencies, one panel per margin.

#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "brbvs/errors.hpp"
#include "brbvs/selection.hpp"

namespace brbvs {

namespace plot_detail {

inline std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace plot_detail

inline std::string selection_svg(const BrbvsResult& r) {
  using plot_detail::escape;
  using plot_detail::fmt;
  constexpr double panel_w = 360, panel_h = 260, left = 50, top = 40, plot_h = 160;
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(2 * panel_w) << "\" height=\""
    << fmt(panel_h) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int which = 1; which <= 2; ++which) {
    const auto& m = which == 1 ? r.margin1 : r.margin2;
    const double x0 = (which - 1) * panel_w;
    o << "<g id=\"margin" << which << "\" transform=\"translate(" << fmt(x0) << ",0)\">\n"
      << "<text x=\"" << fmt(panel_w / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">"
      << "Survival " << which << " (" << code(r.metric) << ")</text>\n"
      << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left)
      << "\" y2=\"" << fmt(top + plot_h) << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + plot_h) << "\" x2=\""
      << fmt(panel_w - 20) << "\" y2=\"" << fmt(top + plot_h) << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double y = top + plot_h * (1.0 - t / 4.0);
      o << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\">" << fmt(t / 4.0) << "</text>\n";
    }
    if (m.frequencies.empty()) {
      o << "<text x=\"" << fmt(panel_w / 2) << "\" y=\"" << fmt(top + plot_h / 2)
        << "\" text-anchor=\"middle\">no variables selected</text>\n";
    } else {
      const double avail = panel_w - 20 - left;
      const double slot = avail / static_cast<double>(m.frequencies.size());
      const double bw = std::min(40.0, 0.7 * slot);
      for (std::size_t k = 0; k < m.frequencies.size(); ++k) {
        const auto& [j, f] = m.frequencies[k];
        const double h = plot_h * std::clamp(f, 0.0, 1.0);
        const double cx = left + slot * (static_cast<double>(k) + 0.5);
        o << "<rect class=\"bar\" x=\"" << fmt(cx - bw / 2) << "\" y=\"" << fmt(top + plot_h - h)
          << "\" width=\"" << fmt(bw) << "\" height=\"" << fmt(h)
          << "\" fill=\"steelblue\" data-frequency=\"" << fmt(f) << "\"/>\n"
          << "<text x=\"" << fmt(cx) << "\" y=\"" << fmt(top + plot_h + 16)
          << "\" text-anchor=\"middle\">" << escape(r.names[j]) << "</text>\n";
      }
    }
    o << "<text x=\"" << fmt(panel_w / 2) << "\" y=\"" << fmt(panel_h - 12)
      << "\" text-anchor=\"middle\">relative frequency of selection</text>\n</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

inline void emit_plot(const BrbvsResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << selection_svg(r);
}

}  // namespace brbvs
