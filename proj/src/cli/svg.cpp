#include "cli/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace fogforge::cli {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string scatter_svg(const std::vector<Series>& series, const std::string& title) {
  const double width = 640, height = 480, left = 70, right = 170, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;

  double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin, cmin = tmin, cmax = -tmin;
  for (const Series& s : series)
    for (const ObjectivePoint& p : s.points) {
      tmin = std::min(tmin, p.time);
      tmax = std::max(tmax, p.time);
      cmin = std::min(cmin, p.cost);
      cmax = std::max(cmax, p.cost);
    }
  if (!(tmin <= tmax)) tmin = 0, tmax = 1, cmin = 0, cmax = 1;
  auto pad = [](double& lo, double& hi) {
    const double span = hi - lo;
    const double m = span > 0 ? span * 0.05 : std::max(1.0, std::abs(hi) * 0.05);
    lo -= m;
    hi += m;
  };
  pad(tmin, tmax);
  pad(cmin, cmax);
  auto x = [&](double t) { return left + (t - tmin) / (tmax - tmin) * pw; };
  auto y = [&](double c) { return top + ph - (c - cmin) / (cmax - cmin) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(left + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
       "</text>\n";
  s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double tv = tmin + (tmax - tmin) * i / 4.0, cv = cmin + (cmax - cmin) * i / 4.0;
    s += "<text x=\"" + num(x(tv)) + "\" y=\"" + num(top + ph + 18) + "\" text-anchor=\"middle\">" + tick(tv) +
         "</text>\n";
    s += "<text x=\"" + num(left - 6) + "\" y=\"" + num(y(cv) + 4) + "\" text-anchor=\"end\">" + tick(cv) +
         "</text>\n";
  }
  s += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(height - 15) +
       "\" text-anchor=\"middle\">response time</text>\n";
  s += "<text transform=\"translate(18," + num(top + ph / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">cost</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* colour = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
    s += "<g fill=\"" + std::string(colour) + "\" fill-opacity=\"0.8\">\n";
    for (const ObjectivePoint& p : series[k].points)
      s += "<circle cx=\"" + num(x(p.time)) + "\" cy=\"" + num(y(p.cost)) + "\" r=\"4\"/>\n";
    s += "</g>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(k);
    s += "<circle cx=\"" + num(left + pw + 20) + "\" cy=\"" + num(ly) + "\" r=\"5\" fill=\"" + colour + "\"/>\n";
    s += "<text x=\"" + num(left + pw + 30) + "\" y=\"" + num(ly + 4) + "\">" + escape(series[k].label) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace fogforge::cli
