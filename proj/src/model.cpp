#include "tfwlab/model.hpp"

#include "tfwlab/errors.hpp"

#include <cmath>
#include <string>

namespace tfwlab::model {

namespace {

void require_open_window(double p, const char* op) {
  if (!(p > 1.5 && p < 2.0))
    throw DomainError(std::string(op) + ": p must lie in (3/2, 2), got " + std::to_string(p));
}

} // namespace

void ModelParams::validate() const {
  if (!(p > 1.0 && p <= 2.0))
    throw DomainError("p must lie in (1, 2], got " + std::to_string(p));
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw DomainError("gamma must be positive");
  if (!(bigA > 0.0) || !std::isfinite(bigA))
    throw DomainError("A must be positive");
  if (!(Z > 0.0) || !std::isfinite(Z))
    throw DomainError("Z must be positive");
  if (K < 1)
    throw DomainError("K must be at least 1");
}

ScalingConstants scaling_constants(double p, double bigA, double gamma) {
  if (!(p > 1.5))
    throw DomainError("scaling_constants: p must exceed 3/2");
  if (!(bigA > 0.0) || !(gamma > 0.0))
    throw DomainError("scaling_constants: A and gamma must be positive");
  const double la = std::log(bigA), lg = std::log(gamma);
  const double d = 4.0 * p - 6.0;
  ScalingConstants s;
  s.a_p = std::exp(la / d - lg / (2.0 * p - 3.0));
  s.b_p = std::exp((2.0 - p) / d * la - lg / d);
  s.c_p = std::exp((3.0 * p - 4.0) / d * la - lg / d);
  return s;
}

double log_c_lambda(double p, double lambda) {
  require_open_window(p, "c_lambda");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw DomainError("c_lambda: lambda must lie in (0, 1)");
  const double e = 2.0 * p - 3.0;
  return (p - 1.0) / e * (std::log(2.0 * kPi) - std::log(lambda)) -
         (2.0 - p) / e * std::log1p(-lambda) + std::log(e) +
         (2.0 - p) / e * std::log(2.0 - p) - (2.0 * p - 2.0) / e * std::log(p - 1.0);
}

double c_lambda(double p, double lambda) { return std::exp(log_c_lambda(p, lambda)); }

double psi_cap_lambda(double p) {
  require_open_window(p, "psi_cap_lambda");
  return (3.0 * p - 4.0) / (2.0 * p - 2.0);
}

double psi_cap_nonpositive_phi(double p) {
  const double lam = psi_cap_lambda(p);
  return std::exp((log_c_lambda(p, lam) - std::log(lam)) / (2.0 * p - 2.0));
}

double psi_cap_closed_form(double p) {
  require_open_window(p, "psi_cap_closed_form");
  const double e = 2.0 * p - 3.0;
  const double l = (4.0 * p - 3.0) / (4.0 * p - 6.0) * std::log(2.0) +
                   (p - 1.0) / e * std::log(kPi) + std::log(e) / (2.0 * p - 2.0) -
                   (3.0 * p - 4.0) / (2.0 * (p - 1.0) * e) * std::log(3.0 * p - 4.0);
  return std::exp(l);
}

double gamma_critical() { return 4.0 * std::sqrt(kPi); }

double nam_particle_bound(double Z) {
  if (!(Z > 0.0))
    throw DomainError("nam_particle_bound: Z must be positive");
  return 5.0 / (4.0 * kNamBeta) * Z;
}

double critical_excess_bound(double gamma, double Z) {
  if (!(gamma > 0.0) || !(Z > 0.0))
    throw DomainError("critical_excess_bound: gamma and Z must be positive");
  const double gc = gamma_critical();
  if (gamma >= gc)
    return 0.0;
  return (gc - gamma) / gamma * Z;
}

VirialResiduals virial_residuals(const EnergyTerms& t, double p) {
  VirialResiduals v;
  v.r1 = t.kinetic + p * t.tf - t.attraction + 2.0 * t.repulsion;
  v.r2 = t.kinetic + 3.0 * t.tf - 2.0 * t.attraction + 5.0 * t.repulsion;
  // 3T + (5p-6)F - Aterm, formed from r1, r2 so the linear identity is exact.
  v.r3 = 5.0 * v.r1 - 2.0 * v.r2;
  v.kinetic_bound_applies = p >= 1.2;
  v.kinetic_bound_holds = 3.0 * t.kinetic <= t.attraction;
  return v;
}

} // namespace tfwlab::model
