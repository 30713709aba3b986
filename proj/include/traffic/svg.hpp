// Self-contained SVG plotting: polylines, scatter, heatmaps and small
// multi-panel layouts. Enough for data inspection, not publication styling.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace traffic::svg {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dotted = false;
  bool scatter = false;
  double marker = 1.5;
  std::string label;
};

struct Panel {
  std::string title, xlabel, ylabel;
  std::vector<Series> series;

  // Optional heatmap drawn under the series: value(i, j) maps row i to the
  // y-range and column j to the x-range.
  Eigen::MatrixXd heat;
  double heat_x0 = 0, heat_x1 = 1, heat_y0 = 0, heat_y1 = 1;
  bool has_heat = false;

  void add_line(std::vector<double> x, std::vector<double> y, std::string color = "#1f77b4",
                std::string label = "", bool dotted = false);
  void add_scatter(std::vector<double> x, std::vector<double> y, std::string color = "#d62728",
                   std::string label = "", double marker = 1.5);
  void set_heatmap(Eigen::MatrixXd values, double x0, double x1, double y0, double y1);
};

// Writes the panels in a grid with `cols` columns.
void write(const std::string& path, const std::vector<Panel>& panels, int cols = 1,
           int panel_width = 560, int panel_height = 360);

}  // namespace traffic::svg
