#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tfwlab::bounds {

enum class Branch { F, G };

std::string branch_name(Branch b);

// Upper bounds on Q from rP(r) >= Q: F covers phi(r) >= 0, G covers phi(r) < 0.
double branch_F(double p, double lambda, double bigR, double r);
double branch_G(double p, double lambda, double bigR, double r);

struct BoundOptions {
  int grid_lambda = 40;
  int grid_R = 40;
  int grid_r = 40;
  double lambda_lo = 0.02;
  double lambda_hi = 0.98;
  double R_lo = 1e-2;
  double r_lo = 1e-2;
  double r_hi = 1e3;
  double tol = 1e-10;   // simplex size at which refinement stops (log coordinates)
  int max_iter = 20000; // simplex iterations per restart
  // When set, r is held fixed and only (lambda, R) are optimized.
  std::optional<double> fixed_r;
};

struct BranchMinimum {
  double value = 0.0;
  double lambda = 0.0;
  double R = 0.0;
  double r = 0.0;
  double coarse_value = 0.0; // best coarse-grid value before refinement
  int evaluations = 0;
  int iterations = 0;
};

struct BoundResult {
  double p = 0.0;
  double B = 0.0;
  Branch branch = Branch::F;
  BranchMinimum F;
  BranchMinimum G;
  BoundOptions options;
};

BranchMinimum minimize_branch(double p, Branch which, const BoundOptions& opts = {});
BoundResult compute_B(double p, const BoundOptions& opts = {});

// Evaluated on up to `jobs` worker threads; output order matches input order.
std::vector<BoundResult> bound_curve(const std::vector<double>& p_values, const BoundOptions& opts = {},
                                     int jobs = 1);

// Evenly spaced exponents on [p_min, p_max].
std::vector<double> sweep(double p_min, double p_max, int steps);

double restore_units(double B, double p, double bigA, double gamma);
double molecular_bound(double B, int K);

void write_curve_csv(const std::string& path, const std::vector<BoundResult>& curve);

} // namespace tfwlab::bounds
