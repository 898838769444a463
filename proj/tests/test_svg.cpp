#include "doctest.h"

#include "tfwlab/svg.hpp"

#include <cmath>

using namespace tfwlab::svg;

TEST_CASE("nice ticks") {
  const auto t = nice_ticks(0.0, 1.0, 5);
  REQUIRE(!t.empty());
  CHECK(t.front() == 0.0);
  CHECK(t.back() == doctest::Approx(1.0));
  CHECK(t.size() == 6);
  const auto u = nice_ticks(1.55, 1.99, 6);
  for (double v : u) {
    CHECK(v >= 1.55 - 1e-12);
    CHECK(v <= 1.99 + 1e-12);
  }
  CHECK(nice_ticks(2.0, 2.0).size() == 1);
}

TEST_CASE("render is self-contained") {
  Plot p;
  p.title = "B(p) <test> & more";
  p.x_label = "p";
  p.y_label = "B";
  Series s;
  for (int i = 0; i < 10; ++i) {
    s.x.push_back(i);
    s.y.push_back(i * i);
  }
  s.y[3] = NAN;
  p.series.push_back(s);
  p.points.push_back({4.0, 16.0, "min"});
  p.vlines.push_back({7.0, 0.0, "gamma_c"});
  const auto svg = render(p);
  CHECK(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("&lt;test&gt; &amp; more") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(svg.find("href") == std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);

  Series bad;
  bad.x = {1.0};
  Plot q;
  q.series.push_back(bad);
  CHECK_THROWS(render(q));
}
