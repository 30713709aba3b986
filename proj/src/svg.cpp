#include "traffic/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "traffic/types.hpp"

namespace traffic::svg {

namespace {

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void grow(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (!(lo < hi)) {
      lo -= 1.0;
      hi += 1.0;
    } else {
      const double m = 0.04 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Compact blue->green->yellow colormap.
std::string colormap(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98},
                              {253, 231, 37}};
  const double ft = t * 4.0;
  const int i = std::min(3, static_cast<int>(ft));
  const double w = ft - i;
  std::ostringstream os;
  os << "rgb(" << static_cast<int>(stops[i][0] + w * (stops[i + 1][0] - stops[i][0])) << ","
     << static_cast<int>(stops[i][1] + w * (stops[i + 1][1] - stops[i][1])) << ","
     << static_cast<int>(stops[i][2] + w * (stops[i + 1][2] - stops[i][2])) << ")";
  return os.str();
}

}  // namespace

void Panel::add_line(std::vector<double> x, std::vector<double> y, std::string color,
                     std::string label, bool dotted) {
  Series s;
  s.x = std::move(x);
  s.y = std::move(y);
  s.color = std::move(color);
  s.label = std::move(label);
  s.dotted = dotted;
  series.push_back(std::move(s));
}

void Panel::add_scatter(std::vector<double> x, std::vector<double> y, std::string color,
                        std::string label, double marker) {
  Series s;
  s.x = std::move(x);
  s.y = std::move(y);
  s.color = std::move(color);
  s.label = std::move(label);
  s.scatter = true;
  s.marker = marker;
  series.push_back(std::move(s));
}

void Panel::set_heatmap(Eigen::MatrixXd values, double x0, double x1, double y0, double y1) {
  heat = std::move(values);
  heat_x0 = x0;
  heat_x1 = x1;
  heat_y0 = y0;
  heat_y1 = y1;
  has_heat = true;
}

void write(const std::string& path, const std::vector<Panel>& panels, int cols, int panel_width,
           int panel_height) {
  if (panels.empty()) throw ValidationError("svg: nothing to draw");
  cols = std::max(1, cols);
  const int rows = (static_cast<int>(panels.size()) + cols - 1) / cols;
  const int W = cols * panel_width;
  const int H = rows * panel_height;
  std::ofstream out(path);
  if (!out) throw ValidationError("svg: cannot open '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
      << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

  const double ml = 62, mr = 16, mt = 30, mb = 42;  // per-panel margins
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& p = panels[pi];
    const double ox = (pi % cols) * panel_width;
    const double oy = (pi / cols) * panel_height;
    const double pw = panel_width - ml - mr;
    const double ph = panel_height - mt - mb;

    Range rx, ry;
    if (p.has_heat) {
      rx.grow(p.heat_x0);
      rx.grow(p.heat_x1);
      ry.grow(p.heat_y0);
      ry.grow(p.heat_y1);
    }
    for (const auto& s : p.series) {
      for (double v : s.x) rx.grow(v);
      for (double v : s.y) ry.grow(v);
    }
    if (!std::isfinite(rx.lo) || !std::isfinite(ry.lo)) {
      rx = Range{0, 1};
      ry = Range{0, 1};
    }
    rx.pad();
    ry.pad();
    auto X = [&](double v) { return ox + ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto Y = [&](double v) { return oy + mt + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

    if (p.has_heat && p.heat.size() > 0) {
      double lo = p.heat.minCoeff(), hi = p.heat.maxCoeff();
      if (!(lo < hi)) hi = lo + 1.0;
      const Eigen::Index nr = p.heat.rows(), nc = p.heat.cols();
      const double cw = (X(p.heat_x1) - X(p.heat_x0)) / nc;
      const double ch = (Y(p.heat_y0) - Y(p.heat_y1)) / nr;
      for (Eigen::Index i = 0; i < nr; ++i) {
        for (Eigen::Index j = 0; j < nc; ++j) {
          const double t = (p.heat(i, j) - lo) / (hi - lo);
          const double x = X(p.heat_x0) + j * cw;
          const double y = Y(p.heat_y1) + i * ch;
          out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cw + 0.5)
              << "\" height=\"" << num(ch + 0.5) << "\" fill=\"" << colormap(t) << "\"/>\n";
        }
      }
    }

    for (const auto& s : p.series) {
      if (s.x.empty()) continue;
      if (s.scatter) {
        out << "<g fill=\"" << s.color << "\" fill-opacity=\"0.55\">\n";
        for (std::size_t i = 0; i < s.x.size(); ++i)
          out << "<circle cx=\"" << num(X(s.x[i])) << "\" cy=\"" << num(Y(s.y[i])) << "\" r=\""
              << num(s.marker) << "\"/>\n";
        out << "</g>\n";
      } else {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\"";
        if (s.dotted) out << " stroke-dasharray=\"4 3\"";
        out << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          if (!std::isfinite(s.y[i])) continue;
          out << num(X(s.x[i])) << "," << num(Y(s.y[i])) << " ";
        }
        out << "\"/>\n";
      }
    }

    // frame, ticks, labels
    out << "<rect x=\"" << num(ox + ml) << "\" y=\"" << num(oy + mt) << "\" width=\"" << num(pw)
        << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int tck = 0; tck <= 4; ++tck) {
      const double fx = rx.lo + (rx.hi - rx.lo) * tck / 4.0;
      const double fy = ry.lo + (ry.hi - ry.lo) * tck / 4.0;
      out << "<text x=\"" << num(X(fx)) << "\" y=\"" << num(oy + mt + ph + 16)
          << "\" font-size=\"10\" text-anchor=\"middle\" fill=\"#333\">" << num(fx)
          << "</text>\n";
      out << "<text x=\"" << num(ox + ml - 6) << "\" y=\"" << num(Y(fy) + 3)
          << "\" font-size=\"10\" text-anchor=\"end\" fill=\"#333\">" << num(fy) << "</text>\n";
    }
    out << "<text x=\"" << num(ox + ml + pw / 2) << "\" y=\"" << num(oy + 18)
        << "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#111\">" << p.title << "</text>\n";
    out << "<text x=\"" << num(ox + ml + pw / 2) << "\" y=\"" << num(oy + mt + ph + 34)
        << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#111\">" << p.xlabel << "</text>\n";
    out << "<text x=\"" << num(ox + 14) << "\" y=\"" << num(oy + mt + ph / 2)
        << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#111\" transform=\"rotate(-90 "
        << num(ox + 14) << " " << num(oy + mt + ph / 2) << ")\">" << p.ylabel << "</text>\n";

    // legend
    double ly = oy + mt + 12;
    for (const auto& s : p.series) {
      if (s.label.empty()) continue;
      out << "<line x1=\"" << num(ox + ml + 8) << "\" y1=\"" << num(ly) << "\" x2=\""
          << num(ox + ml + 28) << "\" y2=\"" << num(ly) << "\" stroke=\"" << s.color
          << "\" stroke-width=\"2\"" << (s.dotted ? " stroke-dasharray=\"4 3\"" : "") << "/>\n"
          << "<text x=\"" << num(ox + ml + 33) << "\" y=\"" << num(ly + 3.5)
          << "\" font-size=\"10\" fill=\"#333\">" << s.label << "</text>\n";
      ly += 14;
    }
  }
  out << "</svg>\n";
}

}  // namespace traffic::svg
