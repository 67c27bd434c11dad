#include "q3p/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "q3p/serialize.hpp"

namespace q3p {

namespace {

constexpr const char* kWinnerColour = "#ff7f0e";
constexpr const char* kBarColour = "#1f77b4";

std::string fmt(double x) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << x;
  return s.str();
}

// Viridis-like ramp from dark blue to yellow.
std::string colour(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(68 + t * (253 - 68)));
  const int g = static_cast<int>(std::lround(1 + t * (231 - 1)));
  const int b = static_cast<int>(std::lround(84 + t * (37 - 84)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string histogram_svg(const SampleHistogram& histogram, const std::string& winner, std::size_t max_bars) {
  auto bars = histogram.sorted();
  // Keep the winner visible even when it falls outside the top entries.
  if (bars.size() > max_bars) {
    auto it = std::find_if(bars.begin(), bars.end(), [&](const auto& b) { return b.first == winner; });
    const bool keep = it != bars.end() && static_cast<std::size_t>(it - bars.begin()) >= max_bars;
    auto w = keep ? *it : std::pair<std::string, std::size_t>{};
    bars.resize(max_bars);
    if (keep) bars.back() = w;
  }
  const double width = 60.0 + 28.0 * static_cast<double>(std::max<std::size_t>(bars.size(), 1));
  const double height = 320.0;
  const double plot_h = 220.0;
  const double base = 250.0;
  const double shots = static_cast<double>(std::max<std::size_t>(histogram.shots, 1));
  double top = 0.0;
  for (const auto& b : bars) top = std::max(top, static_cast<double>(b.second) / shots);
  if (top == 0.0) top = 1.0;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
    << "\">\n";
  s << "<metadata>{\"winner\": \"" << winner << "\", \"shots\": " << histogram.shots << "}</metadata>\n";
  s << "<line x1=\"40\" y1=\"" << fmt(base) << "\" x2=\"" << fmt(width - 10) << "\" y2=\"" << fmt(base)
    << "\" stroke=\"black\"/>\n";
  s << "<text x=\"4\" y=\"" << fmt(base - plot_h) << "\" font-size=\"10\">" << fmt(top) << "</text>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& [key, count] = bars[i];
    const double f = static_cast<double>(count) / shots;
    const double h = plot_h * f / top;
    const double x = 48.0 + 28.0 * static_cast<double>(i);
    const bool is_winner = key == winner;
    s << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(base - h) << "\" width=\"20\" height=\"" << fmt(h)
      << "\" fill=\"" << (is_winner ? kWinnerColour : kBarColour) << "\"" << (is_winner ? " class=\"winner\"" : "")
      << "><title>" << key << ": " << count << "</title></rect>\n";
    s << "<text transform=\"translate(" << fmt(x + 14) << "," << fmt(base + 6) << ") rotate(90)\" font-size=\"9\""
      << " font-family=\"monospace\">" << key << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string landscape_svg(const Landscape& l) {
  const double cell = 24.0;
  const double left = 70.0;
  const double top = 20.0;
  const double w = left + cell * static_cast<double>(l.durations.size()) + 20.0;
  const double h = top + cell * static_cast<double>(l.deltas.size()) + 50.0;
  double pmax = 0.0;
  for (const auto& row : l.probability) {
    for (double p : row) pmax = std::max(pmax, p);
  }
  if (pmax == 0.0) pmax = 1.0;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(h) << "\">\n";
  s << "<metadata>{\"rows\": " << l.deltas.size() << ", \"cols\": " << l.durations.size()
    << ", \"max\": " << format_double(pmax) << "}</metadata>\n";
  // Largest detuning at the top.
  const std::size_t rows = l.deltas.size();
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = top + cell * static_cast<double>(rows - 1 - r);
    s << "<text x=\"4\" y=\"" << fmt(y + cell * 0.65) << "\" font-size=\"9\">" << fmt(l.deltas[r]) << "</text>\n";
    for (std::size_t c = 0; c < l.durations.size(); ++c) {
      const double p = l.probability[r][c];
      s << "<rect x=\"" << fmt(left + cell * static_cast<double>(c)) << "\" y=\"" << fmt(y) << "\" width=\""
        << fmt(cell) << "\" height=\"" << fmt(cell) << "\" fill=\"" << colour(p / pmax) << "\"><title>"
        << format_double(p) << "</title></rect>\n";
    }
  }
  const double base = top + cell * static_cast<double>(rows);
  for (std::size_t c = 0; c < l.durations.size(); ++c) {
    s << "<text transform=\"translate(" << fmt(left + cell * (static_cast<double>(c) + 0.4)) << "," << fmt(base + 6)
      << ") rotate(90)\" font-size=\"9\">" << fmt(l.durations[c]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace q3p
