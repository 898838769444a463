#include "tfwlab/sommerfeld.hpp"

#include "tfwlab/errors.hpp"
#include "tfwlab/model.hpp"

#include <cmath>
#include <string>

namespace tfwlab::sommerfeld {

using model::kPi;

namespace {

void require_radius(double r, const char* op) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw DomainError(std::string(op) + ": radius must be positive");
}

double log_power_coef(double p, double numer) {
  return (p - 1.0) / (2.0 - p) * std::log((p - 1.0) * numer / (2.0 * kPi * (2.0 - p) * (2.0 - p)));
}

double plus_factor(const SommerfeldParams& sp, double k, double r) {
  const double f = 1.0 + k * std::pow(r, -sp.zeta);
  if (!(f > 0.0))
    throw DomainError("omega_plus: 1 + k r^-zeta must be positive");
  return f;
}

} // namespace

SommerfeldParams make_sommerfeld_params(double p) {
  if (!(p > 1.5 && p < 2.0))
    throw DomainError("make_sommerfeld_params: p must lie in (3/2, 2), got " + std::to_string(p));
  SommerfeldParams sp;
  sp.p = p;
  sp.sigma = 2.0 * (p - 1.0) / (2.0 - p);
  sp.zeta = (-5.0 * p + 6.0 + std::sqrt(p * p + 20.0 * p - 28.0)) / (2.0 * (2.0 - p));
  sp.log_b_coef = log_power_coef(p, 3.0 * p - 4.0);
  sp.log_a_coef = log_power_coef(p, p);
  sp.b_coef = std::exp(sp.log_b_coef);
  sp.a_coef = std::exp(sp.log_a_coef);
  return sp;
}

double s_p(const SommerfeldParams& sp, double r) {
  require_radius(r, "s_p");
  return sp.b_coef * std::pow(r, -sp.sigma);
}

double s_pR(const SommerfeldParams& sp, double bigR, double r) {
  require_radius(bigR, "s_pR");
  if (!(r > bigR))
    throw DomainError("s_pR: r must exceed R");
  return std::exp(log_s_pR(sp, bigR, r));
}

double log_s_pR(const SommerfeldParams& sp, double bigR, double r) {
  require_radius(bigR, "s_pR");
  if (!(r > bigR))
    throw DomainError("s_pR: r must exceed R");
  return sp.log_a_coef - sp.sigma * std::log(r - bigR);
}

double omega_plus(const SommerfeldParams& sp, double k, double r) {
  require_radius(r, "omega_plus");
  return plus_factor(sp, k, r) * s_p(sp, r);
}

double omega_minus(const SommerfeldParams& sp, double k, double r) {
  require_radius(r, "omega_minus");
  if (k < 0.0)
    throw DomainError("omega_minus: k must be nonnegative");
  const double m = (sp.p - 1.0) / (2.0 - sp.p);
  return std::pow(1.0 + k * std::pow(r, -sp.zeta), -m) * s_p(sp, r);
}

double sigma_min_bound(const SommerfeldParams& sp, double bigR, double k, double r) {
  return std::fmin(s_pR(sp, bigR, r), omega_plus(sp, k, r));
}

double tf_rhs(const SommerfeldParams& sp, double f) {
  return 4.0 * kPi * std::pow(std::fmax(f, 0.0), 1.0 / (sp.p - 1.0));
}

double laplacian_s_p(const SommerfeldParams& sp, double r) {
  require_radius(r, "laplacian_s_p");
  const double s = sp.sigma;
  return sp.b_coef * s * (s - 1.0) * std::pow(r, -s - 2.0);
}

double laplacian_s_pR(const SommerfeldParams& sp, double bigR, double r) {
  const double f = s_pR(sp, bigR, r);
  const double d = r - bigR;
  const double s = sp.sigma;
  return f * (s * (s + 1.0) / (d * d) - 2.0 * s / (r * d));
}

double laplacian_omega_plus(const SommerfeldParams& sp, double k, double r) {
  plus_factor(sp, k, r);
  const double s = sp.sigma, t = sp.sigma + sp.zeta;
  return sp.b_coef * (s * (s - 1.0) * std::pow(r, -s - 2.0) + k * t * (t - 1.0) * std::pow(r, -t - 2.0));
}

double laplacian_omega_minus(const SommerfeldParams& sp, double k, double r) {
  const double f = omega_minus(sp, k, r);
  const double m = (sp.p - 1.0) / (2.0 - sp.p);
  const double x = k * std::pow(r, -sp.zeta);
  const double y = x / (1.0 + x);
  const double z = sp.zeta;
  // f = exp(L): Delta f = f (L'' + L'^2 + 2L'/r), with r L' = -sigma + m zeta y.
  const double rl1 = -sp.sigma + m * z * y;
  const double r2l2 = sp.sigma - m * z * y - m * z * z * y * (1.0 - y);
  return f / (r * r) * (r2l2 + rl1 * rl1 + 2.0 * rl1);
}

double match_k_plus(const SommerfeldParams& sp, double bigR, double phiR) {
  require_radius(bigR, "match_k_plus");
  if (!(phiR > 0.0) || !std::isfinite(phiR))
    throw BoundaryMatchFailure("match_k_plus: phi(R) must be positive");
  return (phiR / s_p(sp, bigR) - 1.0) * std::pow(bigR, sp.zeta);
}

double match_k_minus(const SommerfeldParams& sp, double bigR, double phiR) {
  require_radius(bigR, "match_k_minus");
  const double s = s_p(sp, bigR);
  if (!(phiR > 0.0) || !(phiR <= s))
    throw BoundaryMatchFailure("match_k_minus: requires 0 < phi(R) <= s_p(R)");
  const double m = (sp.p - 1.0) / (2.0 - sp.p);
  return (std::pow(phiR / s, -1.0 / m) - 1.0) * std::pow(bigR, sp.zeta);
}

std::vector<double> crossing_radii(const SommerfeldParams& sp, double bigR, double k) {
  require_radius(bigR, "crossing_radii");
  // d(r) = log s_pR - log omega_plus on a log-spaced scan of r - R, then bisection.
  auto d = [&](double r) {
    return std::log(s_pR(sp, bigR, r)) - std::log(omega_plus(sp, k, r));
  };
  std::vector<double> roots;
  const int n = 4000;
  const double lo = std::log(bigR * 1e-10), hi = std::log(bigR * 1e10);
  double r_prev = bigR + std::exp(lo);
  double d_prev = d(r_prev);
  for (int i = 1; i <= n; ++i) {
    const double r = bigR + std::exp(lo + (hi - lo) * i / n);
    const double di = d(r);
    if ((d_prev > 0.0) != (di > 0.0)) {
      double a = r_prev, b = r;
      for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
        const double m = 0.5 * (a + b);
        if ((d(m) > 0.0) == (d_prev > 0.0))
          a = m;
        else
          b = m;
      }
      roots.push_back(0.5 * (a + b));
    }
    r_prev = r;
    d_prev = di;
  }
  return roots;
}

} // namespace tfwlab::sommerfeld
