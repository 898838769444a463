#pragma once

#include <vector>

namespace tfwlab::sommerfeld {

// Power-law solutions of Delta phi = 4 pi phi^{1/(p-1)} (gamma = 1).
struct SommerfeldParams {
  double p;
  double sigma;  // 2(p-1)/(2-p)
  double zeta;   // remainder exponent
  double b_coef; // S_p = b r^{-sigma}
  double a_coef; // shifted supersolution a (r-R)^{-sigma}
  double log_b_coef;
  double log_a_coef; // finite where a_coef overflows (p near 2)
};

SommerfeldParams make_sommerfeld_params(double p);

double s_p(const SommerfeldParams& sp, double r);
double s_pR(const SommerfeldParams& sp, double bigR, double r);
double log_s_pR(const SommerfeldParams& sp, double bigR, double r);
double omega_plus(const SommerfeldParams& sp, double k, double r);
double omega_minus(const SommerfeldParams& sp, double k, double r);
double sigma_min_bound(const SommerfeldParams& sp, double bigR, double k, double r);

// Right-hand side 4 pi f^{1/(p-1)} of the differential TF equation.
double tf_rhs(const SommerfeldParams& sp, double f);

// Analytic radial Laplacians f'' + 2f'/r.
double laplacian_s_p(const SommerfeldParams& sp, double r);
double laplacian_s_pR(const SommerfeldParams& sp, double bigR, double r);
double laplacian_omega_plus(const SommerfeldParams& sp, double k, double r);
double laplacian_omega_minus(const SommerfeldParams& sp, double k, double r);

// Remainder constants k with omega_plus(k, R) = phiR, omega_minus(k, R) = phiR.
double match_k_plus(const SommerfeldParams& sp, double bigR, double phiR);
double match_k_minus(const SommerfeldParams& sp, double bigR, double phiR);

// All radii r > R where s_pR(r) = omega_plus(k, r), ascending. The two curves
// meet an even number of times (zero or two) since a(p) > b(p).
std::vector<double> crossing_radii(const SommerfeldParams& sp, double bigR, double k);

} // namespace tfwlab::sommerfeld
