#include "doctest.h"

#include "tfwlab/bounds.hpp"
#include "tfwlab/errors.hpp"
#include "tfwlab/model.hpp"
#include "tfwlab/sommerfeld.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace tfwlab;
using namespace tfwlab::bounds;
using doctest::Approx;
using model::kPi;

TEST_CASE("branch functions against hand composition") {
  const double pi2 = kPi * kPi;
  const double y = 25.0 / pi2 + pi2;
  const double F = 2.0 * std::sqrt(4.0 * kPi * std::pow((y + 18.0 * pi2) / 0.5, 1.5) + y * y);
  const double G = 2.0 * std::sqrt(4.0 * kPi * std::pow(18.0 * pi2 / 0.5, 1.5) + y * y);
  CHECK(branch_F(5.0 / 3.0, 0.5, 1.0, 2.0) == Approx(F).epsilon(1e-13));
  CHECK(branch_G(5.0 / 3.0, 0.5, 1.0, 2.0) == Approx(G).epsilon(1e-13));

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> P(1.55, 1.95), L(0.05, 0.95), U(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double p = P(rng), lam = L(rng), r = std::exp(4.0 * U(rng) - 2.0), R = r * (0.05 + 0.9 * U(rng));
    CHECK(branch_G(p, lam, R, r) <= branch_F(p, lam, R, r));
    const auto sp = sommerfeld::make_sommerfeld_params(p);
    const double yy = sommerfeld::s_pR(sp, R, r) + kPi * kPi / (R * R);
    const double c = model::c_lambda(p, lam);
    const double direct = r * std::sqrt(4.0 * kPi * std::pow((yy + c) / lam, 1.0 / (p - 1.0)) + yy * yy);
    CHECK(branch_F(p, lam, R, r) == Approx(direct).epsilon(1e-11));
  }
  CHECK_THROWS_AS(branch_F(5.0 / 3.0, 0.0, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(branch_F(5.0 / 3.0, 0.5, 2.0, 2.0), DomainError);
  CHECK_THROWS_AS(branch_G(1.5, 0.5, 1.0, 2.0), DomainError);
  // blows up at the edges of the domain
  CHECK(branch_F(5.0 / 3.0, 1e-6, 1.0, 2.0) > 1e3 * branch_F(5.0 / 3.0, 0.5, 1.0, 2.0));
  CHECK(branch_F(5.0 / 3.0, 0.5, 2.0 - 1e-6, 2.0) > 1e3 * branch_F(5.0 / 3.0, 0.5, 1.0, 2.0));
  CHECK(branch_G(5.0 / 3.0, 0.5, 1.0, 1e8) > 1e3 * branch_G(5.0 / 3.0, 0.5, 1.0, 2.0));
}

TEST_CASE("B(5/3) agrees with a dense brute-force search") {
  const auto b = compute_B(5.0 / 3.0);
  CHECK(b.B == std::max(b.F.value, b.G.value));
  CHECK(b.B == Approx(270.7395).epsilon(1e-6));
  for (const auto* m : {&b.F, &b.G}) {
    CHECK(m->lambda > 0.0);
    CHECK(m->lambda < 1.0);
    CHECK(m->R > 0.0);
    CHECK(m->R < m->r);
    CHECK(m->value <= m->coarse_value);
  }
  // 200^3 grid over (lambda, R/r, r), independent of the optimizer
  double bestF = INFINITY, bestG = INFINITY;
  for (int i = 0; i < 200; ++i) {
    const double lam = 0.5 + 0.3 * (i + 0.5) / 200.0;
    for (int k = 0; k < 200; ++k) {
      const double r = 0.5 + 0.7 * (k + 0.5) / 200.0;
      for (int j = 0; j < 200; ++j) {
        const double R = r * (0.2 + 0.6 * (j + 0.5) / 200.0);
        bestF = std::min(bestF, branch_F(5.0 / 3.0, lam, R, r));
        bestG = std::min(bestG, branch_G(5.0 / 3.0, lam, R, r));
      }
    }
  }
  CHECK(b.F.value <= bestF);
  CHECK(b.G.value <= bestG);
  CHECK(b.F.value == Approx(bestF).epsilon(1e-3));
  CHECK(b.G.value == Approx(bestG).epsilon(1e-3));
}

TEST_CASE("minimum of B near p = 1.8431") {
  const auto b = compute_B(1.8431);
  CHECK(b.B == Approx(101.14).epsilon(0.01));
  // rises toward both ends of the sweep
  CHECK(compute_B(1.56).B > b.B);
  CHECK(compute_B(1.98).B > b.B);
  CHECK(compute_B(1.83).B > compute_B(1.84).B);
  CHECK(compute_B(1.86).B > compute_B(1.845).B);
}

TEST_CASE("fixed r restricts the search") {
  BoundOptions o;
  o.fixed_r = 2.0;
  const auto m = minimize_branch(5.0 / 3.0, Branch::F, o);
  CHECK(m.r == 2.0);
  CHECK(m.R < 2.0);
  CHECK(m.value >= compute_B(5.0 / 3.0).F.value);
}

TEST_CASE("sweeps, threads and units") {
  const auto ps = sweep(1.55, 1.99, 90);
  CHECK(ps.size() == 90);
  CHECK(ps.front() == 1.55);
  CHECK(ps.back() == Approx(1.99).epsilon(1e-15));
  CHECK(sweep(1.7, 1.7, 1) == std::vector<double>{1.7});
  CHECK_THROWS_AS(sweep(1.4, 1.9, 5), DomainError);
  CHECK_THROWS_AS(sweep(1.6, 2.0, 5), DomainError);
  CHECK_THROWS_AS(sweep(1.6, 1.9, 0), DomainError);

  const auto few = sweep(1.6, 1.95, 8);
  const auto serial = bound_curve(few, {}, 1);
  const auto parallel = bound_curve(few, {}, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].p == few[i]);
    CHECK(serial[i].B == parallel[i].B);
  }
  CHECK_THROWS_AS(bound_curve({1.6, 1.45}, {}, 2), DomainError);

  CHECK(restore_units(123.0, 5.0 / 3.0, 1.0, 1.0) == Approx(123.0).epsilon(1e-15));
  CHECK(restore_units(100.0, 5.0 / 3.0, 1.0, 8.0) == Approx(100.0 / (16.0 * std::sqrt(2.0))).epsilon(1e-13));
  CHECK(restore_units(7.0, 1.8, 2.0, 3.0) == 7.0 * model::scaling_constants(1.8, 2.0, 3.0).c_p);
  CHECK(molecular_bound(101.14, 1) == 101.14);
  CHECK(molecular_bound(101.14, 2) == Approx(202.28));
  CHECK_THROWS_AS(molecular_bound(1.0, 0), DomainError);
}

TEST_CASE("curve CSV") {
  const auto curve = bound_curve(sweep(1.7, 1.8, 3), {}, 2);
  const auto path = (std::filesystem::temp_directory_path() / "tfwlab_curve.csv").string();
  write_curve_csv(path, curve);
  std::ifstream is(path);
  std::string line;
  std::getline(is, line);
  CHECK(line == "p,B,branch,lambda,R,r");
  int rows = 0;
  while (std::getline(is, line))
    ++rows;
  CHECK(rows == 3);
  std::filesystem::remove(path);
}
