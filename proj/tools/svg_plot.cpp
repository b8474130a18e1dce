#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace calderon::cli {
namespace {

constexpr double kW = 720, kH = 440, kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string label(double v, bool log) {
  std::ostringstream o;
  o.precision(3);
  if (log) o << "1e" << int(std::lround(v));
  else o << v;
  return o.str();
}

}  // namespace

std::string render_svg(const ExperimentRecord& r) {
  auto tx = [&](double v) { return r.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return r.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!r.log_x || x > 0) && (!r.log_y || y > 0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : r.series)
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (usable(s.x[i], s.y[i])) {
        x0 = std::min(x0, tx(s.x[i]));
        x1 = std::max(x1, tx(s.x[i]));
        y0 = std::min(y0, ty(s.y[i]));
        y1 = std::max(y1, ty(s.y[i]));
      }
  if (!(x0 <= x1)) return "";
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y0))) {
    const double pad = std::max(0.5, std::abs(y0) * 0.1);
    y0 -= pad;
    y1 += pad;
  }
  if (r.log_x) x0 = std::floor(x0), x1 = std::ceil(x1);
  if (r.log_y) y0 = std::floor(y0), y1 = std::ceil(y1);
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kTop + (1 - (v - y0) / (y1 - y0)) * ph; };

  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(r.experiment)
    << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double vx = x0 + (x1 - x0) * i / 5, vy = y0 + (y1 - y0) * i / 5;
    const bool int_x = !r.log_x || std::abs(vx - std::round(vx)) < 1e-9;
    const bool int_y = !r.log_y || std::abs(vy - std::round(vy)) < 1e-9;
    if (int_x)
      o << "<text x=\"" << px(vx) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << label(vx, r.log_x)
        << "</text>\n";
    if (int_y)
      o << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(vy) + 4 << "\" text-anchor=\"end\">" << label(vy, r.log_y)
        << "</text>\n";
    o << "<line x1=\"" << px(vx) << "\" y1=\"" << kTop << "\" x2=\"" << px(vx) << "\" y2=\"" << kTop + ph
      << "\" stroke=\"#ddd\"/>\n";
    o << "<line x1=\"" << kLeft << "\" y1=\"" << py(vy) << "\" x2=\"" << kLeft + pw << "\" y2=\"" << py(vy)
      << "\" stroke=\"#ddd\"/>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 18 << "\" text-anchor=\"middle\">" << esc(r.x_label)
    << "</text>\n";
  o << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << kTop + ph / 2 << ")\">" << esc(r.y_label) << "</text>\n";
  for (std::size_t k = 0; k < r.series.size(); ++k) {
    const auto& s = r.series[k];
    const char* color = kColors[k % std::size(kColors)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (usable(s.x[i], s.y[i])) o << px(tx(s.x[i])) << ',' << py(ty(s.y[i])) << ' ';
    o << "\"/>\n";
    if (s.x.size() <= 64)
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (usable(s.x[i], s.y[i]))
          o << "<circle cx=\"" << px(tx(s.x[i])) << "\" cy=\"" << py(ty(s.y[i])) << "\" r=\"2.5\" fill=\"" << color
            << "\"/>\n";
    const double ly = kTop + 14 + 18 * double(k);
    o << "<line x1=\"" << kW - kRight + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kW - kRight + 32 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << kW - kRight + 38 << "\" y=\"" << ly << "\">" << esc(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace calderon::cli
