#pragma once

#include <string>
#include <vector>

namespace tfwlab::svg {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
  std::string color = "#1f4e9c";
};

struct Annotation {
  double x = 0.0;
  double y = 0.0;
  std::string text;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<Annotation> points;  // dot plus text
  std::vector<Annotation> vlines;  // dashed vertical line at x, text at the top
  int width = 720;
  int height = 480;
};

// Tick positions covering [lo, hi] with a 1-2-5 step.
std::vector<double> nice_ticks(double lo, double hi, int target = 6);

std::string render(const Plot& plot);
void write(const std::string& path, const Plot& plot);

} // namespace tfwlab::svg
