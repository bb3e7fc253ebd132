#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace subcol::cli {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

SvgCanvas::SvgCanvas(int width, int height) : width_(width), height_(height) {}

void SvgCanvas::line(double x1, double y1, double x2, double y2, const std::string& color,
                     double width) {
  body_ += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" +
           fmt(y2) + "\" stroke=\"" + color + "\" stroke-width=\"" + fmt(width) + "\"/>\n";
}

void SvgCanvas::polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::string& color, double width) {
  if (xs.empty()) return;
  body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + fmt(width) +
           "\" points=\"";
  for (size_t i = 0; i < xs.size(); ++i) {
    body_ += fmt(xs[i]) + "," + fmt(ys[i]);
    if (i + 1 < xs.size()) body_ += " ";
  }
  body_ += "\"/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& fill) {
  body_ += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" + fmt(r) + "\" fill=\"" +
           fill + "\"/>\n";
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& fill) {
  body_ += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) + "\" height=\"" +
           fmt(h) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& content, int font_size,
                     const std::string& color) {
  body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" +
           std::to_string(font_size) + "\" font-family=\"sans-serif\" fill=\"" + color + "\">" +
           escape_xml(content) + "</text>\n";
}

std::string SvgCanvas::finish() const {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
         "width=\"" +
         std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
         "\" viewBox=\"0 0 " + std::to_string(width_) + " " + std::to_string(height_) + "\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n" + body_ + "</svg>\n";
}

void SvgCanvas::write(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw IoError(IoError::Kind::OpenFailed, "cannot open for write: " + path);
  os << finish();
  os.flush();
  if (!os) throw IoError(IoError::Kind::OpenFailed, "write failed: " + path);
}

double PlotFrame::sx(double x) const {
  double span = x_max - x_min;
  if (span <= 0) span = 1;
  return left + (x - x_min) / span * (width - left - right);
}

double PlotFrame::sy(double y) const {
  double span = y_max - y_min;
  if (span <= 0) span = 1;
  return height - bottom - (y - y_min) / span * (height - top - bottom);
}

void PlotFrame::draw_axes(SvgCanvas& svg, const std::string& title) const {
  svg.line(left, height - bottom, width - right, height - bottom, "#333333");
  svg.line(left, top, left, height - bottom, "#333333");
  svg.text(left, top - 8, title, 13);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", y_min);
  svg.text(4, height - bottom, buf, 10, "#555555");
  std::snprintf(buf, sizeof(buf), "%.3g", y_max);
  svg.text(4, top + 10, buf, 10, "#555555");
  std::snprintf(buf, sizeof(buf), "%.3g", x_min);
  svg.text(left, height - bottom + 14, buf, 10, "#555555");
  std::snprintf(buf, sizeof(buf), "%.3g", x_max);
  svg.text(width - right - 30, height - bottom + 14, buf, 10, "#555555");
}

std::string heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  int r = static_cast<int>(255 * t);
  int g = static_cast<int>(64 * (1 - std::abs(2 * t - 1)));
  int b = static_cast<int>(255 * (1 - t));
  char buf[10];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

void write_series_svg(const std::string& path, const std::vector<double>& ys,
                      const std::string& title, bool log_y) {
  if (ys.empty()) throw ValidationError("write_series_svg: empty series");
  std::vector<double> vals = ys;
  if (log_y)
    for (double& v : vals) v = std::log10(std::max(v, 1e-300));
  PlotFrame f;
  f.x_min = 1;
  f.x_max = static_cast<double>(vals.size());
  auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
  f.y_min = *mn;
  f.y_max = *mx;
  if (f.y_max == f.y_min) {
    f.y_min -= 0.5;
    f.y_max += 0.5;
  }
  SvgCanvas svg(f.width, f.height);
  f.draw_axes(svg, title + (log_y ? " (log10)" : ""));
  std::vector<double> xs(vals.size()), sys(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) {
    xs[i] = f.sx(static_cast<double>(i + 1));
    sys[i] = f.sy(vals[i]);
  }
  svg.polyline(xs, sys, "#1f5fbf", 1.5);
  svg.write(path);
}

void write_scatter_svg(const std::string& path, const Matrix& a, const std::string& label_a,
                       const Matrix& b, const std::string& label_b, const std::string& title) {
  if (a.rows < 2 || b.rows < 2)
    throw ValidationError("write_scatter_svg: need at least 2 rows to plot");
  PlotFrame f;
  f.x_min = f.y_min = 1e300;
  f.x_max = f.y_max = -1e300;
  for (const Matrix* m : {&a, &b}) {
    for (int j = 0; j < m->cols; ++j) {
      f.x_min = std::min(f.x_min, (*m)(0, j));
      f.x_max = std::max(f.x_max, (*m)(0, j));
      f.y_min = std::min(f.y_min, (*m)(1, j));
      f.y_max = std::max(f.y_max, (*m)(1, j));
    }
  }
  double padx = 0.05 * (f.x_max - f.x_min + 1e-12);
  double pady = 0.05 * (f.y_max - f.y_min + 1e-12);
  f.x_min -= padx;
  f.x_max += padx;
  f.y_min -= pady;
  f.y_max += pady;
  SvgCanvas svg(f.width, f.height);
  f.draw_axes(svg, title);
  for (int j = 0; j < a.cols; ++j) svg.circle(f.sx(a(0, j)), f.sy(a(1, j)), 3.0, "#1f5fbf");
  for (int j = 0; j < b.cols; ++j) svg.circle(f.sx(b(0, j)), f.sy(b(1, j)), 3.0, "#c43a3a");
  svg.text(f.width - 150, f.top + 12, label_a, 11, "#1f5fbf");
  svg.text(f.width - 150, f.top + 26, label_b, 11, "#c43a3a");
  svg.write(path);
}

void write_singular_values_svg(const std::string& path,
                               const std::vector<std::vector<double>>& profiles,
                               const std::string& title) {
  if (profiles.empty()) throw ValidationError("write_singular_values_svg: no profiles");
  PlotFrame f;
  f.x_min = 1;
  f.x_max = 1;
  for (const auto& p : profiles) f.x_max = std::max(f.x_max, static_cast<double>(p.size()));
  f.y_min = 0;
  f.y_max = 1.05;
  SvgCanvas svg(f.width, f.height);
  f.draw_axes(svg, title);
  const char* colors[] = {"#1f5fbf", "#c43a3a", "#2b8a3e", "#b0892b", "#7048a8", "#0b7285"};
  for (size_t c = 0; c < profiles.size(); ++c) {
    std::vector<double> xs, ys;
    for (size_t i = 0; i < profiles[c].size(); ++i) {
      xs.push_back(f.sx(static_cast<double>(i + 1)));
      ys.push_back(f.sy(profiles[c][i]));
    }
    svg.polyline(xs, ys, colors[c % 6], 1.5);
    svg.text(f.width - 110, f.top + 12 + 14 * static_cast<double>(c),
             "class " + std::to_string(c), 11, colors[c % 6]);
  }
  svg.write(path);
}

void write_heatmap_svg(const std::string& path, const Matrix& c_abs, double top2_mass) {
  const int n = c_abs.rows;
  if (n < 1 || c_abs.cols != n) throw ValidationError("write_heatmap_svg: C must be square");
  const int panel = 320, margin = 34, gap = 40;
  SvgCanvas svg(2 * panel + 3 * margin + gap - margin, panel + 2 * margin + 26);
  double vmax = max_abs(c_abs);
  if (vmax <= 0) vmax = 1;
  const double cell = static_cast<double>(panel) / n;
  const double log_floor = 1e-8;

  for (int pass = 0; pass < 2; ++pass) {
    double x0 = margin + pass * (panel + gap);
    double y0 = margin + 16;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double v = std::abs(c_abs(i, j));
        double t;
        if (pass == 0) {
          t = v / vmax;
        } else {
          double lv = std::log10(std::max(v, log_floor * vmax));
          double lo = std::log10(log_floor * vmax), hi = std::log10(vmax);
          t = (lv - lo) / (hi - lo + 1e-300);
        }
        svg.rect(x0 + j * cell, y0 + i * cell, cell + 0.5, cell + 0.5, heat_color(t));
      }
    }
    svg.text(x0, margin + 4, pass == 0 ? "|C| (linear scale)" : "|C| (log scale)", 12);
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "top-2 entry mass: %.4f", top2_mass);
  svg.text(margin, panel + margin + 16 + 22, buf, 12);
  svg.write(path);
}

}  // namespace subcol::cli
