#pragma once

#include "tfwlab/model.hpp"
#include "tfwlab/radial.hpp"

#include <string>

namespace tfwlab::solvers {

using model::EnergyTerms;
using model::ModelParams;
using radial::GridPtr;
using radial::RadialProfile;

struct SolverOptions {
  double scf_tol = 1e-10;   // sup |phi_new - phi_old| / Z
  double euler_tol = 1e-6;  // bound on euler_residual
  double mixing = 0.3;      // initial damping alpha
  int max_iterations = 500; // self-consistency cap
  bool newton_polish = true;
  double polish_switch = 1e-3; // SCF update below which the coupled Newton takes over
  int max_newton = 60;
  int max_inner = 400;
  // TF shooting
  int tf_substeps = 4;
  double tf_separation_tol = 1e-10;
  double tf_horizon = 1e3; // classification continues to horizon * r_max
  int tf_max_segments = 2000;
};

struct TFWSolution {
  ModelParams params;
  RadialProfile psi;
  RadialProfile phi;
  EnergyTerms terms;
  double N = 0.0;
  double Q = 0.0;
  double euler_residual = 0.0;
  double scf_update = 0.0;
  int iterations = 0;

  RadialProfile rho() const;
  RadialProfile P() const;
};

struct TFSolution {
  ModelParams params;
  RadialProfile phi;
  RadialProfile rho;
  double N = 0.0;
  double slope = 0.0; // u'(r_min)
  int segments = 0;
  int bisections = 0;
};

// Default log grid for an atom: r_min = 1e-4/Z, n = 4000, r_max = 1e4 for p > 3/2
// and 1e6 at p = 3/2, where neutral atoms carry a psi ~ a/r^2 tail.
GridPtr default_grid(const ModelParams& params, std::size_t n = 4000);

TFWSolution solve_tfw(const ModelParams& params, GridPtr grid, const SolverOptions& opts = {});
TFSolution solve_tf(const ModelParams& params, GridPtr grid, const SolverOptions& opts = {});

// sup_i |-A Lap psi + (gamma psi^{2p-2} - phi) psi| / sup |phi psi| over interior nodes.
double euler_residual(const RadialProfile& psi, const RadialProfile& phi, const ModelParams& params);

EnergyTerms energy_terms(const RadialProfile& psi, const ModelParams& params);

// Assemble a solution record from profiles (recomputes N, Q, terms and residual).
TFWSolution make_tfw_solution(const ModelParams& params, RadialProfile psi, RadialProfile phi,
                              int iterations, double scf_update);

// r,psi,phi,rho,P CSV plus key=value sidecar at csv_path + ".meta".
void write_solution(const std::string& csv_path, const TFWSolution& sol);
void write_solution(const std::string& csv_path, const TFSolution& sol);
TFWSolution read_tfw_solution(const std::string& csv_path);
TFSolution read_tf_solution(const std::string& csv_path);
std::string sidecar_path(const std::string& csv_path);

} // namespace tfwlab::solvers
