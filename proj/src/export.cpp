#include "lsflow/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace lsflow {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t";
  for (std::size_t i = 1; i <= traj.nodes; ++i)
    for (std::size_t d = 1; d <= traj.dim; ++d) out += ",x_" + std::to_string(i) + "_" + std::to_string(d);
  out += '\n';
  for (const Sample& s : traj.samples) {
    out += format_number(s.t);
    for (double v : s.x) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

std::string series_csv(const ErrorSeries& series) {
  std::string out = "t,value\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    out += format_number(series.times[k]);
    out += ',';
    out += format_number(series.values[k]);
    out += '\n';
  }
  return out;
}

ErrorSeries parse_series_csv(const std::string& text, const std::string& label) {
  ErrorSeries out;
  out.label = label;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("t,", 0) == 0) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 't,value'");
    }
    const std::string a = line.substr(0, comma);
    const std::string b = line.substr(comma + 1);
    char* end_a = nullptr;
    char* end_b = nullptr;
    const double t = std::strtod(a.c_str(), &end_a);
    const double v = std::strtod(b.c_str(), &end_b);
    if (end_a == a.c_str() || *end_a != '\0' || end_b == b.c_str() || *end_b != '\0') {
      throw std::runtime_error("line " + std::to_string(line_no) + ": not a number pair");
    }
    if (!out.times.empty() && !(t > out.times.back())) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": times must increase");
    }
    out.times.push_back(t);
    out.values.push_back(v);
  }
  return out;
}

std::string slope_fit_json(const SlopeFit& fit) {
  return "{\"slope\":" + format_number(fit.slope) + ",\"intercept\":" + format_number(fit.intercept) +
         ",\"t_lo\":" + format_number(fit.t_lo) + ",\"t_hi\":" + format_number(fit.t_hi) +
         ",\"rms_residual\":" + format_number(fit.rms_residual) + "}\n";
}

namespace {

std::string fmt(const char* pattern, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

}  // namespace

std::string loglog_svg(const ErrorSeries& series, const std::optional<SlopeFit>& fit) {
  constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < series.size(); ++k)
    if (series.times[k] > 0.0 && series.values[k] > 0.0)
      pts.emplace_back(std::log10(series.times[k]), std::log10(series.values[k]));

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << series.label << " (log10-log10)</text>\n";
  if (pts.size() < 2) {
    svg << "</svg>\n";
    return svg.str();
  }
  double x0 = pts.front().first, x1 = pts.front().first, y0 = pts.front().second, y1 = pts.front().second;
  for (const auto& [x, y] : pts) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  x0 = std::floor(x0);
  x1 = std::ceil(x1);
  y0 = std::floor(y0);
  y1 = std::ceil(y1);
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  svg << "<g stroke=\"#ccc\" stroke-width=\"1\">\n";
  for (double d = x0; d <= x1 + 1e-9; d += 1) {
    svg << "<line x1=\"" << fmt("%.2f", px(d)) << "\" y1=\"" << kTop << "\" x2=\"" << fmt("%.2f", px(d))
        << "\" y2=\"" << kTop + ph << "\"/>\n";
  }
  for (double d = y0; d <= y1 + 1e-9; d += 1) {
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << fmt("%.2f", py(d)) << "\" x2=\"" << kLeft + pw << "\" y2=\""
        << fmt("%.2f", py(d)) << "\"/>\n";
  }
  svg << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double d = x0; d <= x1 + 1e-9; d += 1)
    svg << "<text x=\"" << fmt("%.2f", px(d)) << "\" y=\"" << kTop + ph + 16
        << "\" text-anchor=\"middle\">1e" << fmt("%.0f", d) << "</text>\n";
  for (double d = y0; d <= y1 + 1e-9; d += 1)
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt("%.2f", py(d) + 4) << "\" text-anchor=\"end\">1e"
        << fmt("%.0f", d) << "</text>\n";
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">t</text>\n";
  svg << "</g>\n";

  svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (const auto& [x, y] : pts) svg << fmt("%.2f", px(x)) << ',' << fmt("%.2f", py(y)) << ' ';
  svg << "\"/>\n";
  if (fit) {
    const double a = std::log10(fit->t_lo), b = std::log10(fit->t_hi);
    svg << "<line x1=\"" << fmt("%.2f", px(a)) << "\" y1=\"" << fmt("%.2f", py(fit->intercept + fit->slope * a))
        << "\" x2=\"" << fmt("%.2f", px(b)) << "\" y2=\"" << fmt("%.2f", py(fit->intercept + fit->slope * b))
        << "\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6,4\"/>\n";
    svg << "<text x=\"" << kLeft + pw - 4 << "\" y=\"" << kTop + 16
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#d62728\">slope "
        << fmt("%.4f", fit->slope) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace lsflow
