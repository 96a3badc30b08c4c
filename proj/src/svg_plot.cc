#include "airtime/svg_plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace airtime {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 40.0;

std::string Num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.1f", v);
  return buffer;
}

std::string Escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

void WriteCellSvg(std::ostream& out, const std::string& title,
                  const std::vector<WindowRow>& rows, double capacity_bps,
                  double band) {
  double y_max = capacity_bps * (1.0 + band) * 1.15;
  for (const WindowRow& row : rows) {
    for (double v : {row.measured_bps, row.total_sp_bps, row.total_ss_bps}) {
      if (!std::isnan(v)) y_max = std::max(y_max, v);
    }
  }
  if (!(y_max > 0.0)) y_max = 1.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double n = std::max<double>(1.0, static_cast<double>(rows.size()) - 1);
  auto x = [&](size_t i) { return kLeft + plot_w * static_cast<double>(i) / n; };
  auto y = [&](double v) { return kTop + plot_h * (1.0 - v / y_max); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" "
      << "font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"18\">" << Escape(title) << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << Num(y(capacity_bps * (1 + band)))
      << "\" width=\"" << Num(plot_w) << "\" height=\""
      << Num(y(capacity_bps * (1 - band)) - y(capacity_bps * (1 + band)))
      << "\" fill=\"#d8f0d8\"/>\n";
  out << "<line x1=\"" << kLeft << "\" x2=\"" << Num(kLeft + plot_w)
      << "\" y1=\"" << Num(y(capacity_bps)) << "\" y2=\""
      << Num(y(capacity_bps)) << "\" stroke=\"green\"/>\n";
  out << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft << "\" y1=\"" << kTop
      << "\" y2=\"" << Num(kTop + plot_h) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" x2=\"" << Num(kLeft + plot_w)
      << "\" y1=\"" << Num(kTop + plot_h) << "\" y2=\"" << Num(kTop + plot_h)
      << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = y_max * tick / 4.0;
    out << "<text x=\"4\" y=\"" << Num(y(v) + 4) << "\">" << Num(v / 1e6)
        << "</text>\n";
  }
  out << "<text x=\"" << Num(kLeft + plot_w / 2 - 40) << "\" y=\""
      << Num(kHeight - 10) << "\">window</text>\n";

  struct Series {
    double WindowRow::*field;
    const char* color;
    const char* label;
  };
  const Series series[] = {
      {&WindowRow::measured_bps, "#444444", "measured"},
      {&WindowRow::total_sp_bps, "#1f77b4", "total SP"},
      {&WindowRow::total_ss_bps, "#d62728", "total SS"},
  };
  double legend_x = kLeft + plot_w - 260;
  for (const Series& s : series) {
    std::string points;
    for (size_t i = 0; i < rows.size(); ++i) {
      const double v = rows[i].*s.field;
      if (std::isnan(v)) continue;
      points += Num(x(i)) + "," + Num(y(v)) + " ";
    }
    if (points.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\""
        << points << "\"/>\n";
    out << "<text x=\"" << Num(legend_x) << "\" y=\"18\" fill=\"" << s.color
        << "\">" << s.label << "</text>\n";
    legend_x += 80;
  }
  out << "</svg>\n";
}

}  // namespace airtime
