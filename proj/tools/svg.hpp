#pragma once

#include <string>
#include <vector>

#include "subcol/numlin.hpp"

namespace subcol::cli {

/// Minimal SVG writer for the report plots; no external plotting dependency.
class SvgCanvas {
 public:
  SvgCanvas(int width, int height);

  void line(double x1, double y1, double x2, double y2, const std::string& color,
            double width = 1.0);
  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color, double width = 1.0);
  void circle(double cx, double cy, double r, const std::string& fill);
  void rect(double x, double y, double w, double h, const std::string& fill);
  void text(double x, double y, const std::string& content, int font_size = 12,
            const std::string& color = "#000000");

  std::string finish() const;
  void write(const std::string& path) const;

  int width() const { return width_; }
  int height() const { return height_; }

 private:
  int width_, height_;
  std::string body_;
};

/// Maps data coordinates into a plot rectangle with margins, y up.
struct PlotFrame {
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  double left = 50, right = 10, top = 24, bottom = 34;
  int width = 480, height = 360;

  double sx(double x) const;
  double sy(double y) const;
  void draw_axes(SvgCanvas& svg, const std::string& title) const;
};

std::string escape_xml(const std::string& s);

/// Blue-to-red color for t in [0, 1].
std::string heat_color(double t);

/// Line plot of one series against iteration count.
void write_series_svg(const std::string& path, const std::vector<double>& ys,
                      const std::string& title, bool log_y);

/// Scatter of two point sets (columns of 2xN matrices).
void write_scatter_svg(const std::string& path, const Matrix& a, const std::string& label_a,
                       const Matrix& b, const std::string& label_b, const std::string& title);

/// Per-class normalized singular-value profiles (one polyline per class).
void write_singular_values_svg(const std::string& path,
                               const std::vector<std::vector<double>>& profiles,
                               const std::string& title);

/// Two-panel |C| heatmap, linear and logarithmic color scales, annotated with
/// the top-2 entry mass.
void write_heatmap_svg(const std::string& path, const Matrix& c_abs, double top2_mass);

}  // namespace subcol::cli
