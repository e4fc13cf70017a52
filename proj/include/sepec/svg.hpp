#pragma once

// Minimal SVG line charts of aggregate metrics against epsilon, one series per method.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "sepec/sim.hpp"

namespace sepec::io {

enum class Metric { Rmse, Power, SafetyLoss };

inline std::string metric_name(Metric m) {
  switch (m) {
    case Metric::Rmse: return "rmse";
    case Metric::Power: return "power";
    case Metric::SafetyLoss: return "mean_safety_loss";
  }
  return "rmse";
}

inline double metric_value(const sim::AggregateRow& r, Metric m) {
  switch (m) {
    case Metric::Rmse: return r.rmse;
    case Metric::Power: return r.power;
    case Metric::SafetyLoss: return r.mean_safety_loss;
  }
  return r.rmse;
}

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline std::string line_chart_svg(const std::vector<sim::AggregateRow>& rows, Metric metric) {
  static const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::vector<std::string> order;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo, y_lo = x_lo, y_hi = -x_lo;
  for (const auto& r : rows) {
    const double y = metric_value(r, metric);
    if (!std::isfinite(y)) continue;
    if (!series.count(r.method)) order.push_back(r.method);
    series[r.method].emplace_back(r.eps, y);
    x_lo = std::min(x_lo, r.eps);
    x_hi = std::max(x_hi, r.eps);
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  }
  const double W = 640, H = 400, L = 70, R = 160, Tm = 40, B = 50;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + detail::svg_num(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + metric_name(metric) + " vs epsilon</text>\n";
  if (order.empty()) return out + "</svg>\n";
  if (x_hi == x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  y_lo = std::min(y_lo, 0.0);
  if (y_hi == y_lo) y_hi = y_lo + 1.0;
  const double pw = W - L - R, ph = H - Tm - B;
  auto px = [&](double x) { return L + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return Tm + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };
  const std::string axis_style = "stroke=\"black\" stroke-width=\"1\"";
  out += "<line x1=\"" + detail::svg_num(L) + "\" y1=\"" + detail::svg_num(Tm + ph) + "\" x2=\"" +
         detail::svg_num(L + pw) + "\" y2=\"" + detail::svg_num(Tm + ph) + "\" " + axis_style + "/>\n";
  out += "<line x1=\"" + detail::svg_num(L) + "\" y1=\"" + detail::svg_num(Tm) + "\" x2=\"" + detail::svg_num(L) +
         "\" y2=\"" + detail::svg_num(Tm + ph) + "\" " + axis_style + "/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = y_lo + (y_hi - y_lo) * i / 4.0;
    out += "<text x=\"" + detail::svg_num(L - 6) + "\" y=\"" + detail::svg_num(py(y) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + detail::svg_num(y) + "</text>\n";
  }
  std::vector<double> xs;
  for (const auto& [m, pts] : series)
    for (const auto& p : pts) xs.push_back(p.first);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs)
    out += "<text x=\"" + detail::svg_num(px(x)) + "\" y=\"" + detail::svg_num(Tm + ph + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + detail::svg_num(x) + "</text>\n";
  out += "<text x=\"" + detail::svg_num(L + pw / 2) + "\" y=\"" + detail::svg_num(H - 10) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">epsilon</text>\n";
  for (std::size_t s = 0; s < order.size(); ++s) {
    auto pts = series[order[s]];
    std::sort(pts.begin(), pts.end());
    const std::string color = palette[s % (sizeof palette / sizeof *palette)];
    std::string poly;
    for (const auto& [x, y] : pts) poly += detail::svg_num(px(x)) + "," + detail::svg_num(py(y)) + " ";
    out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" + poly + "\"/>\n";
    for (const auto& [x, y] : pts)
      out += "<circle cx=\"" + detail::svg_num(px(x)) + "\" cy=\"" + detail::svg_num(py(y)) + "\" r=\"3\" fill=\"" +
             color + "\"/>\n";
    const double ly = Tm + 10 + 18.0 * static_cast<double>(s);
    out += "<line x1=\"" + detail::svg_num(L + pw + 15) + "\" y1=\"" + detail::svg_num(ly) + "\" x2=\"" +
           detail::svg_num(L + pw + 35) + "\" y2=\"" + detail::svg_num(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + detail::svg_num(L + pw + 40) + "\" y=\"" + detail::svg_num(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + detail::xml_escape(order[s]) + "</text>\n";
  }
  return out + "</svg>\n";
}

}  // namespace sepec::io
