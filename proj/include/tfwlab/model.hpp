#pragma once

namespace tfwlab::model {

inline constexpr double kNamBeta = 0.8218;
inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct ModelParams {
  double p = 5.0 / 3.0;
  double gamma = 1.0;
  double bigA = 1.0;
  double Z = 1.0;
  int K = 1;

  // Throws DomainError unless p in (1,2], gamma, A, Z > 0 and K >= 1.
  void validate() const;
};

struct ScalingConstants {
  double a_p;
  double b_p;
  double c_p;
};

struct EnergyTerms {
  double kinetic = 0.0;
  double tf = 0.0;
  double attraction = 0.0;
  double repulsion = 0.0;

  double total() const { return kinetic + tf - attraction + repulsion; }
  double magnitude() const { return kinetic + tf + attraction + repulsion; }
};

struct VirialResiduals {
  double r1;
  double r2;
  double r3;
  bool kinetic_bound_applies; // p >= 6/5
  bool kinetic_bound_holds;   // 3T <= Aterm
};

// psi(x) = a_p psit(b_p x), Z = c_p Zt maps (A, gamma) to unit couplings.
ScalingConstants scaling_constants(double p, double bigA, double gamma);

double c_lambda(double p, double lambda);
double log_c_lambda(double p, double lambda);

// Optimal lambda for the cap on psi where phi <= 0.
double psi_cap_lambda(double p);
// min over lambda of (c_p(lambda)/lambda)^{1/(2p-2)}.
double psi_cap_nonpositive_phi(double p);
// 2^{(4p-3)/(4p-6)} pi^{(p-1)/(2p-3)} (2p-3)^{1/(2p-2)} / (3p-4)^{(3p-4)/(2(p-1)(2p-3))};
// equals 2 sqrt(pi) times psi_cap_nonpositive_phi.
double psi_cap_closed_form(double p);

double gamma_critical();
double nam_particle_bound(double Z);
double critical_excess_bound(double gamma, double Z);

VirialResiduals virial_residuals(const EnergyTerms& terms, double p);

} // namespace tfwlab::model
