#include "tfwlab/svg.hpp"

#include "tfwlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace tfwlab::svg {

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

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

} // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo))
    return {lo};
  const double raw = (hi - lo) / std::max(target, 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
    t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return t;
}

std::string render(const Plot& plot) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size())
      throw DomainError("svg: series x and y differ in length");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
        continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  for (const auto& v : plot.vlines) {
    x0 = std::min(x0, v.x);
    x1 = std::max(x1, v.x);
  }
  if (!std::isfinite(x0)) {
    x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  }
  if (x1 == x0)
    x0 -= 0.5, x1 += 0.5;
  if (y1 == y0)
    y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double W = plot.width, H = plot.height;
  const double left = 80, right = 20, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  auto X = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto Y = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!plot.title.empty())
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(plot.title)
       << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : nice_ticks(x0, x1)) {
    os << "<line x1=\"" << X(t) << "\" y1=\"" << top + ph << "\" x2=\"" << X(t) << "\" y2=\"" << top + ph + 5
       << "\" stroke=\"black\"/>";
    os << "<text x=\"" << X(t) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << fmt(t)
       << "</text>\n";
  }
  for (double t : nice_ticks(y0, y1)) {
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << Y(t) << "\" x2=\"" << left << "\" y2=\"" << Y(t)
       << "\" stroke=\"black\"/>";
    os << "<line x1=\"" << left << "\" y1=\"" << Y(t) << "\" x2=\"" << left + pw << "\" y2=\"" << Y(t)
       << "\" stroke=\"#dddddd\"/>";
    os << "<text x=\"" << left - 8 << "\" y=\"" << Y(t) + 4 << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << escape(plot.x_label)
     << "</text>\n";
  os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << top + ph / 2 << ")\">" << escape(plot.y_label) << "</text>\n";

  for (const auto& v : plot.vlines) {
    os << "<line x1=\"" << X(v.x) << "\" y1=\"" << top << "\" x2=\"" << X(v.x) << "\" y2=\"" << top + ph
       << "\" stroke=\"#b03030\" stroke-dasharray=\"6,4\"/>";
    os << "<text x=\"" << X(v.x) + 4 << "\" y=\"" << top + 14 << "\" fill=\"#b03030\">" << escape(v.text)
       << "</text>\n";
  }
  int k = 0;
  for (const auto& s : plot.series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
        os << X(s.x[i]) << ',' << Y(s.y[i]) << ' ';
    os << "\"/>\n";
    if (!s.label.empty())
      os << "<text x=\"" << left + pw - 10 << "\" y=\"" << top + 18 + 16 * k << "\" text-anchor=\"end\" fill=\""
         << s.color << "\">" << escape(s.label) << "</text>\n";
    ++k;
  }
  for (const auto& a : plot.points) {
    os << "<circle cx=\"" << X(a.x) << "\" cy=\"" << Y(a.y) << "\" r=\"4\" fill=\"#b03030\"/>";
    os << "<text x=\"" << X(a.x) + 6 << "\" y=\"" << Y(a.y) - 8 << "\">" << escape(a.text) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write(const std::string& path, const Plot& plot) {
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error("cannot write " + path);
  os << render(plot);
}

} // namespace tfwlab::svg
