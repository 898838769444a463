#include "doctest.h"

#include "tfwlab/errors.hpp"
#include "tfwlab/model.hpp"
#include "tfwlab/sommerfeld.hpp"

#include <cmath>
#include <vector>

using namespace tfwlab;
using namespace tfwlab::sommerfeld;
using doctest::Approx;
using model::kPi;

namespace {

std::vector<double> p_grid() {
  std::vector<double> ps;
  for (int i = 0; i <= 8; ++i)
    ps.push_back(1.55 + 0.05 * i);
  return ps;
}

std::vector<double> log_radii(double lo, double hi, int n) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i)
    r[i] = lo * std::pow(hi / lo, i / (n - 1.0));
  return r;
}

// f'' + 2 f'/r by a fourth-order central difference, as an independent check on the analytic forms
template <class F>
double fd_laplacian(F f, double r) {
  const double h = 1e-3 * r;
  const double d1 = (f(r - 2 * h) - 8 * f(r - h) + 8 * f(r + h) - f(r + 2 * h)) / (12 * h);
  const double d2 = (-f(r - 2 * h) + 16 * f(r - h) - 30 * f(r) + 16 * f(r + h) - f(r + 2 * h)) / (12 * h * h);
  return d2 + 2.0 * d1 / r;
}

} // namespace

TEST_CASE("Sommerfeld constants at p = 5/3") {
  const auto sp = make_sommerfeld_params(5.0 / 3.0);
  CHECK(sp.sigma == Approx(4.0).epsilon(1e-14));
  CHECK(sp.b_coef == Approx(9.0 / (kPi * kPi)).epsilon(1e-13));
  CHECK(sp.a_coef == Approx(25.0 / (kPi * kPi)).epsilon(1e-13));
  CHECK(std::abs(sp.zeta - (std::sqrt(73.0) - 7.0) / 2.0) <= 1e-12);
  CHECK(sp.zeta == Approx(0.77200).epsilon(1e-5));
  CHECK(s_p(sp, 1.0) == Approx(9.0 / (kPi * kPi)).epsilon(1e-13));
  CHECK(s_p(sp, 2.0) == Approx(9.0 / (kPi * kPi) / 16.0).epsilon(1e-13));
  CHECK(s_pR(sp, 1.0, 2.0) == Approx(25.0 / (kPi * kPi)).epsilon(1e-13));
  CHECK(omega_plus(sp, 0.0, 1.7) == s_p(sp, 1.7));
  CHECK(omega_plus(sp, 1.0, 1.0) == Approx(18.0 / (kPi * kPi)).epsilon(1e-13));
  CHECK(omega_minus(sp, 0.0, 1.7) == Approx(s_p(sp, 1.7)).epsilon(1e-15));
}

TEST_CASE("b(1.8) and structural identities") {
  const auto sp18 = make_sommerfeld_params(1.8);
  CHECK(sp18.b_coef == Approx(394.3779742959533).epsilon(1e-12));
  for (double p : p_grid()) {
    const auto sp = make_sommerfeld_params(p);
    CHECK(sp.sigma == Approx(2.0 * (p - 1.0) / (2.0 - p)).epsilon(1e-15));
    CHECK(sp.zeta > 0.0);
    const double z = sp.zeta;
    CHECK(z * z + (5.0 * p - 6.0) / (2.0 - p) * z == Approx(2.0 * (3.0 * p - 4.0) / (2.0 - p)).epsilon(1e-12));
    CHECK(sp.a_coef > sp.b_coef);
    CHECK(sp.b_coef > 0.0);
    // s_pR with r - R = 1 is a(p)
    CHECK(s_pR(sp, 3.0, 4.0) == Approx(sp.a_coef).epsilon(1e-12));
  }
  CHECK_THROWS_AS(make_sommerfeld_params(1.5), DomainError);
  CHECK_THROWS_AS(make_sommerfeld_params(2.0), DomainError);
  CHECK_THROWS_AS(s_pR(sp18, 1.0, 0.5), DomainError);
}

TEST_CASE("S_p solves the generalized TF equation") {
  double worst = 0.0;
  for (double p : p_grid()) {
    const auto sp = make_sommerfeld_params(p);
    for (double r : log_radii(1e-2, 1e3, 200)) {
      const double lhs = laplacian_s_p(sp, r);
      worst = std::max(worst, std::abs(lhs - tf_rhs(sp, s_p(sp, r))) / std::abs(lhs));
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("analytic Laplacians agree with finite differences") {
  for (double p : {1.6, 5.0 / 3.0, 1.8}) {
    const auto sp = make_sommerfeld_params(p);
    for (double r : {0.5, 2.0, 7.0}) {
      CHECK(laplacian_s_p(sp, r) == Approx(fd_laplacian([&](double x) { return s_p(sp, x); }, r)).epsilon(1e-6));
      CHECK(laplacian_s_pR(sp, 0.25, r) ==
            Approx(fd_laplacian([&](double x) { return s_pR(sp, 0.25, x); }, r)).epsilon(1e-6));
      for (double k : {0.1, 1.0, 10.0}) {
        CHECK(laplacian_omega_plus(sp, k, r) ==
              Approx(fd_laplacian([&](double x) { return omega_plus(sp, k, x); }, r)).epsilon(1e-6));
        CHECK(laplacian_omega_minus(sp, k, r) ==
              Approx(fd_laplacian([&](double x) { return omega_minus(sp, k, x); }, r)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("super- and subsolution inequalities") {
  for (double p : p_grid()) {
    const auto sp = make_sommerfeld_params(p);
    for (double r : log_radii(1e-2, 1e3, 1000)) {
      for (double R : {1e-3, 1e-2 * r, 0.5 * r}) {
        const double s = s_pR(sp, R, r);
        CHECK(laplacian_s_pR(sp, R, r) <= tf_rhs(sp, s) * (1.0 + 1e-12));
      }
      for (double k : {0.1, 1.0, 10.0}) {
        const double up = omega_plus(sp, k, r), down = omega_minus(sp, k, r);
        CHECK(laplacian_omega_plus(sp, k, r) <= tf_rhs(sp, up) * (1.0 + 1e-12));
        CHECK(laplacian_omega_minus(sp, k, r) >= tf_rhs(sp, down) * (1.0 - 1e-12));
        CHECK(down < s_p(sp, r));
        CHECK(up > s_p(sp, r));
      }
    }
  }
}

TEST_CASE("boundary matching reproduces phi(R)") {
  const auto sp = make_sommerfeld_params(5.0 / 3.0);
  const double R = 1.3;
  for (double frac : {0.2, 0.7, 1.0}) {
    const double phiR = frac * s_p(sp, R);
    const double kp = match_k_plus(sp, R, phiR), km = match_k_minus(sp, R, phiR);
    CHECK(omega_plus(sp, kp, R) == Approx(phiR).epsilon(1e-13));
    CHECK(omega_minus(sp, km, R) == Approx(phiR).epsilon(1e-13));
    CHECK(km >= 0.0);
  }
  CHECK(match_k_plus(sp, R, s_p(sp, R)) == Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(match_k_minus(sp, R, 1.1 * s_p(sp, R)), BoundaryMatchFailure);
  CHECK_THROWS_AS(match_k_minus(sp, R, 0.0), BoundaryMatchFailure);
  CHECK_THROWS_AS(match_k_plus(sp, R, -1.0), BoundaryMatchFailure);
  CHECK_THROWS_AS(omega_minus(sp, -0.5, 1.0), DomainError);
  CHECK_THROWS_AS(omega_plus(sp, -2.0, 1.0), DomainError);
}

TEST_CASE("crossings of s_pR and omega_plus") {
  const auto sp = make_sommerfeld_params(5.0 / 3.0);
  // a(p) > b(p): the curves meet an even number of times
  CHECK(crossing_radii(sp, 1.0, 1.0).empty());
  CHECK(sigma_min_bound(sp, 1.0, 1.0, 3.0) == Approx(omega_plus(sp, 1.0, 3.0)));
  const auto roots = crossing_radii(sp, 1.0, 20.0);
  REQUIRE(roots.size() == 2);
  for (double r : roots)
    CHECK(s_pR(sp, 1.0, r) == Approx(omega_plus(sp, 20.0, r)).epsilon(1e-9));
  const double mid = std::sqrt(roots[0] * roots[1]);
  CHECK(s_pR(sp, 1.0, mid) < omega_plus(sp, 20.0, mid));
  CHECK(sigma_min_bound(sp, 1.0, 20.0, mid) == s_pR(sp, 1.0, mid));
}
