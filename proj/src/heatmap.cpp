#include "nhlattice/heatmap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "nhlattice/error.hpp"

namespace nhl {

namespace {

// Dark violet to yellow; luminance rises between every pair of anchors.
constexpr Rgb kAnchors[] = {{68, 1, 84},    {71, 44, 122},  {59, 81, 139},  {44, 113, 142}, {33, 144, 141},
                            {39, 173, 129}, {92, 200, 99},  {170, 220, 50}, {253, 231, 37}};
constexpr int kLevels = 256;

constexpr double kPlotW = 640.0;
constexpr double kPlotH = 400.0;
constexpr double kLeft = 70.0;
constexpr double kTop = 40.0;
constexpr double kBarGap = 20.0;
constexpr double kBarW = 16.0;

double channel_linear(std::uint8_t c) {
  const double s = c / 255.0;
  return s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
}

std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

int level_of(double v) {
  return std::clamp(static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * (kLevels - 1))), 0, kLevels - 1);
}

}  // namespace

Rgb heatmap_color(double v) {
  static const std::array<Rgb, kLevels> table = [] {
    std::array<Rgb, kLevels> t{};
    constexpr int segments = static_cast<int>(std::size(kAnchors)) - 1;
    double prev = -1.0;
    for (int i = 0; i < kLevels; ++i) {
      const double x = static_cast<double>(i) / (kLevels - 1) * segments;
      const int k = std::min(static_cast<int>(x), segments - 1);
      const double f = x - k;
      Rgb c{};
      for (int ch = 0; ch < 3; ++ch) {
        const double a = kAnchors[k][ch], b = kAnchors[k + 1][ch];
        c[ch] = static_cast<std::uint8_t>(std::lround(a + f * (b - a)));
      }
      // 8-bit rounding can repeat a colour; green moves luminance the most
      while (relative_luminance(c) <= prev && c[1] < 255) ++c[1];
      prev = relative_luminance(c);
      t[static_cast<std::size_t>(i)] = c;
    }
    return t;
  }();
  return table[static_cast<std::size_t>(level_of(std::isfinite(v) ? v : 0.0))];
}

double relative_luminance(Rgb c) {
  return 0.2126 * channel_linear(c[0]) + 0.7152 * channel_linear(c[1]) + 0.0722 * channel_linear(c[2]);
}

std::string render_heatmap(const Trajectory& traj, const std::string& title) {
  if (traj.n_samples() == 0 || traj.n_sites() == 0) {
    throw InvalidArgument("cannot render an empty trajectory", "trajectory");
  }
  const std::size_t ns = traj.n_samples();
  const std::size_t nsites = traj.n_sites();

  std::vector<std::vector<double>> rho(ns);
  double vmax = 0.0;
  for (std::size_t s = 0; s < ns; ++s) {
    rho[s] = normalized_profile(traj.states[s]);
    for (double v : rho[s]) {
      if (std::isfinite(v)) vmax = std::max(vmax, v);
    }
  }

  const double cw = kPlotW / static_cast<double>(ns);
  const double ch = kPlotH / static_cast<double>(nsites);
  const double width = kLeft + kPlotW + kBarGap + kBarW + 60.0;
  const double height = kTop + kPlotH + 60.0;

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!title.empty()) {
    svg += "<text x=\"" + num(kLeft + kPlotW / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(title) + "</text>\n";
  }
  svg += "<g shape-rendering=\"crispEdges\">\n";
  // Runs of equal color along each site row become a single rect.
  for (std::size_t k = 0; k < nsites; ++k) {
    const double y = kTop + kPlotH - (static_cast<double>(k) + 1.0) * ch;
    std::size_t s = 0;
    while (s < ns) {
      const double v = vmax > 0.0 ? rho[s][k] / vmax : 0.0;
      const int level = level_of(v);
      std::size_t e = s + 1;
      while (e < ns && level_of(vmax > 0.0 ? rho[e][k] / vmax : 0.0) == level) ++e;
      svg += "<rect x=\"" + num(kLeft + static_cast<double>(s) * cw) + "\" y=\"" + num(y) + "\" width=\"" +
             num(static_cast<double>(e - s) * cw) + "\" height=\"" + num(ch) + "\" fill=\"" +
             hex(heatmap_color(static_cast<double>(level) / (kLevels - 1))) + "\"/>\n";
      s = e;
    }
  }
  svg += "</g>\n";
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kPlotW) + "\" height=\"" +
         num(kPlotH) + "\" fill=\"none\" stroke=\"#000000\"/>\n";

  // Axis ticks at the ends and the middle.
  const auto& labels = traj.site_labels();
  const double t0 = traj.times.front(), t1 = traj.times.back();
  for (int i = 0; i <= 2; ++i) {
    const double f = i / 2.0;
    const double x = kLeft + f * kPlotW;
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(kTop + kPlotH + 16) + "\" text-anchor=\"middle\">" +
           num(t0 + f * (t1 - t0)) + "</text>\n";
    const std::size_t idx = static_cast<std::size_t>(std::lround(f * static_cast<double>(nsites - 1)));
    const double y = kTop + kPlotH - (static_cast<double>(idx) + 0.5) * ch;
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" +
           std::to_string(labels[idx]) + "</text>\n";
  }
  svg += "<text x=\"" + num(kLeft + kPlotW / 2) + "\" y=\"" + num(kTop + kPlotH + 40) +
         "\" text-anchor=\"middle\">time t</text>\n";
  svg += "<text x=\"18\" y=\"" + num(kTop + kPlotH / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         num(kTop + kPlotH / 2) + ")\">site n</text>\n";

  const double bx = kLeft + kPlotW + kBarGap;
  const int bar_steps = 64;
  svg += "<g shape-rendering=\"crispEdges\">\n";
  for (int i = 0; i < bar_steps; ++i) {
    const double v = (i + 0.5) / bar_steps;
    const double h = kPlotH / bar_steps;
    svg += "<rect x=\"" + num(bx) + "\" y=\"" + num(kTop + kPlotH - (i + 1) * h) + "\" width=\"" + num(kBarW) +
           "\" height=\"" + num(h) + "\" fill=\"" + hex(heatmap_color(v)) + "\"/>\n";
  }
  svg += "</g>\n";
  svg += "<rect x=\"" + num(bx) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kBarW) + "\" height=\"" +
         num(kPlotH) + "\" fill=\"none\" stroke=\"#000000\"/>\n";
  svg += "<text x=\"" + num(bx + kBarW + 4) + "\" y=\"" + num(kTop + 4) + "\">" + num(vmax) + "</text>\n";
  svg += "<text x=\"" + num(bx + kBarW + 4) + "\" y=\"" + num(kTop + kPlotH + 4) + "\">0</text>\n";
  svg += "<text x=\"" + num(bx + kBarW / 2) + "\" y=\"" + num(kTop - 8) + "\" text-anchor=\"middle\">|rho|</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace nhl
