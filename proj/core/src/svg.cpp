#include "seabed/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "seabed/errors.hpp"
#include "seabed/io.hpp"

namespace seabed {
namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;        // data range
  int left, right, top, bottom; // pixel margins
  int width, height;
  bool log_y;

  double px(double x) const {
    return left + (x - x0) / (x1 - x0) * (width - left - right);
  }
  double py(double y) const {
    const double t = log_y ? (std::log10(y) - std::log10(y0)) / (std::log10(y1) - std::log10(y0))
                           : (y - y0) / (y1 - y0);
    return height - bottom - t * (height - top - bottom);
  }
};

void draw_axes(std::ostringstream& out, const Frame& f, const PlotOptions& opts) {
  out << "<rect x='" << f.left << "' y='" << f.top << "' width='" << (f.width - f.left - f.right)
      << "' height='" << (f.height - f.top - f.bottom)
      << "' fill='none' stroke='#333' stroke-width='1'/>\n";
  const int n_ticks = 5;
  for (int k = 0; k <= n_ticks; ++k) {
    const double x = f.x0 + (f.x1 - f.x0) * k / n_ticks;
    const double px = f.px(x);
    out << "<line x1='" << fmt(px) << "' y1='" << (f.height - f.bottom) << "' x2='" << fmt(px)
        << "' y2='" << (f.height - f.bottom + 5) << "' stroke='#333'/>\n";
    out << "<text x='" << fmt(px) << "' y='" << (f.height - f.bottom + 18)
        << "' font-size='11' text-anchor='middle'>" << fmt(x) << "</text>\n";
    double y;
    if (f.log_y) {
      y = std::pow(10.0, std::log10(f.y0) + (std::log10(f.y1) - std::log10(f.y0)) * k / n_ticks);
    } else {
      y = f.y0 + (f.y1 - f.y0) * k / n_ticks;
    }
    const double py = f.py(y);
    out << "<line x1='" << (f.left - 5) << "' y1='" << fmt(py) << "' x2='" << f.left << "' y2='"
        << fmt(py) << "' stroke='#333'/>\n";
    out << "<text x='" << (f.left - 8) << "' y='" << fmt(py + 4)
        << "' font-size='11' text-anchor='end'>" << fmt(y) << "</text>\n";
  }
  if (!opts.title.empty())
    out << "<text x='" << (f.width / 2) << "' y='18' font-size='14' text-anchor='middle'>"
        << escape(opts.title) << "</text>\n";
  if (!opts.x_label.empty())
    out << "<text x='" << (f.width / 2) << "' y='" << (f.height - 6)
        << "' font-size='12' text-anchor='middle'>" << escape(opts.x_label) << "</text>\n";
  if (!opts.y_label.empty())
    out << "<text x='14' y='" << (f.height / 2) << "' font-size='12' text-anchor='middle'"
        << " transform='rotate(-90 14 " << (f.height / 2) << ")'>" << escape(opts.y_label)
        << "</text>\n";
}

}  // namespace

PlotSeries series_from_field(const std::string& label, const ScalarField& f,
                             const std::string& color) {
  PlotSeries s;
  s.label = label;
  s.color = color;
  const Grid1D& g = f.grid();
  s.x.resize(g.n);
  s.y.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    s.x[i] = g.x(i);
    s.y[i] = f[i];
  }
  return s;
}

std::string render_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& opts) {
  if (series.empty()) throw IoError("line plot needs at least one series");
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size() || s.x.empty())
      throw IoError("series '" + s.label + "' is empty or ragged");
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (opts.log_y && s.y[i] <= 0) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  if (!opts.log_y) {
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
  }
  Frame f{x0, x1, y0, y1, 60, 20, 30, 42, opts.width, opts.height, opts.log_y};
  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << opts.width << "' height='"
      << opts.height << "' font-family='sans-serif'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  draw_axes(out, f, opts);
  int ci = 0;
  for (const auto& s : series) {
    const std::string color = s.color.empty() ? kPalette[ci % 8] : s.color;
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (opts.log_y && s.y[i] <= 0) continue;
      out << fmt(f.px(s.x[i])) << ',' << fmt(f.py(s.y[i])) << ' ';
    }
    out << "'/>\n";
    const int ly = f.top + 16 + 16 * ci;
    out << "<line x1='" << (opts.width - f.right - 120) << "' y1='" << ly << "' x2='"
        << (opts.width - f.right - 96) << "' y2='" << ly << "' stroke='" << color
        << "' stroke-width='2'/>\n";
    out << "<text x='" << (opts.width - f.right - 90) << "' y='" << (ly + 4)
        << "' font-size='11'>" << escape(s.label) << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_bar_chart(const std::vector<std::string>& labels,
                             const std::vector<double>& values, const PlotOptions& opts) {
  if (labels.size() != values.size() || labels.empty())
    throw IoError("bar chart needs matching non-empty labels and values");
  double y0 = 0, y1 = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    y1 = std::max(y1, v);
    y0 = std::min(y0, v);
  }
  if (opts.log_y) {
    y0 = std::numeric_limits<double>::infinity();
    for (double v : values)
      if (v > 0) y0 = std::min(y0, v);
    if (!std::isfinite(y0)) y0 = 1e-16;
    if (!(y1 > 0)) y1 = 1;
    y0 /= 2;
    y1 *= 2;
  } else if (!(y1 > y0)) {
    y1 = y0 + 1;
  }
  Frame f{0, 1, y0, y1, 60, 20, 30, 60, opts.width, opts.height, opts.log_y};
  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << opts.width << "' height='"
      << opts.height << "' font-family='sans-serif'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<rect x='" << f.left << "' y='" << f.top << "' width='"
      << (f.width - f.left - f.right) << "' height='" << (f.height - f.top - f.bottom)
      << "' fill='none' stroke='#333'/>\n";
  if (!opts.title.empty())
    out << "<text x='" << (f.width / 2) << "' y='18' font-size='14' text-anchor='middle'>"
        << escape(opts.title) << "</text>\n";
  const int n = static_cast<int>(values.size());
  const double span = f.width - f.left - f.right;
  const double slot = span / n;
  const double base = f.py(opts.log_y ? y0 : std::max(0.0, y0));
  for (int i = 0; i < n; ++i) {
    const double v = values[i];
    const double cx = f.left + slot * (i + 0.5);
    if (!opts.log_y || v > 0) {
      const double top = f.py(opts.log_y ? std::max(v, y0) : v);
      out << "<rect x='" << fmt(cx - slot * 0.35) << "' y='" << fmt(std::min(top, base))
          << "' width='" << fmt(slot * 0.7) << "' height='" << fmt(std::abs(base - top))
          << "' fill='" << kPalette[i % 8] << "'/>\n";
    }
    out << "<text x='" << fmt(cx) << "' y='" << (f.height - f.bottom + 16)
        << "' font-size='11' text-anchor='middle'>" << escape(labels[i]) << "</text>\n";
    out << "<text x='" << fmt(cx) << "' y='" << (f.height - f.bottom + 30)
        << "' font-size='9' text-anchor='middle'>" << fmt(v) << "</text>\n";
  }
  // Left axis ticks.
  for (int k = 0; k <= 4; ++k) {
    double y;
    if (opts.log_y) {
      y = std::pow(10.0, std::log10(y0) + (std::log10(y1) - std::log10(y0)) * k / 4.0);
    } else {
      y = y0 + (y1 - y0) * k / 4.0;
    }
    out << "<text x='" << (f.left - 8) << "' y='" << fmt(f.py(y) + 4)
        << "' font-size='10' text-anchor='end'>" << fmt(y) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_svg(const std::string& path, const std::string& document) {
  write_text_atomic(path, document);
}

}  // namespace seabed
