#include "tfwlab/bounds.hpp"

#include "tfwlab/errors.hpp"
#include "tfwlab/model.hpp"
#include "tfwlab/sommerfeld.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

namespace tfwlab::bounds {

using model::kPi;

namespace {

double log_add(double a, double b) {
  if (a < b)
    std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity())
    return a;
  return a + std::log1p(std::exp(b - a));
}

void require_args(double p, double lambda, double bigR, double r) {
  if (!(p > 1.5 && p < 2.0))
    throw DomainError("branch function: p must lie in (3/2, 2)");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw DomainError("branch function: lambda must lie in (0, 1)");
  if (!(bigR > 0.0 && r > bigR) || !std::isfinite(r))
    throw DomainError("branch function: need 0 < R < r");
}

// log of the branch function, evaluated without forming large powers.
double log_branch(const sommerfeld::SommerfeldParams& sp, Branch which, double lambda, double bigR, double r) {
  const double p = sp.p;
  const double q = 1.0 / (p - 1.0);
  const double log_y = log_add(sommerfeld::log_s_pR(sp, bigR, r), 2.0 * std::log(kPi / bigR));
  const double log_c = model::log_c_lambda(p, lambda);
  const double log_inner = which == Branch::F ? log_add(log_y, log_c) : log_c;
  const double log_t1 = std::log(4.0 * kPi) + q * (log_inner - std::log(lambda));
  return std::log(r) + 0.5 * log_add(log_t1, 2.0 * log_y);
}

struct Objective {
  const sommerfeld::SommerfeldParams* sp;
  Branch which;
  std::optional<double> fixed_r;
  int evaluations = 0;

  // x = (logit lambda, log R, log(r - R)) or, with r fixed, (logit lambda, logit(R/r)).
  void decode(const double* x, double& lambda, double& bigR, double& r) const {
    lambda = 1.0 / (1.0 + std::exp(-x[0]));
    if (fixed_r) {
      r = *fixed_r;
      bigR = r / (1.0 + std::exp(-x[1]));
    } else {
      bigR = std::exp(x[1]);
      r = bigR + std::exp(x[2]);
    }
  }

  double operator()(const double* x) {
    ++evaluations;
    double lambda, bigR, r;
    decode(x, lambda, bigR, r);
    if (!(lambda > 0.0 && lambda < 1.0) || !(bigR > 0.0) || !(r > bigR) || !std::isfinite(r))
      return std::numeric_limits<double>::infinity();
    const double v = log_branch(*sp, which, lambda, bigR, r);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }
};

double gsl_objective(const gsl_vector* v, void* params) {
  auto* obj = static_cast<Objective*>(params);
  return (*obj)(gsl_vector_const_ptr(v, 0));
}

void encode(const Objective& obj, double lambda, double bigR, double r, double* x) {
  x[0] = std::log(lambda / (1.0 - lambda));
  if (obj.fixed_r) {
    const double t = bigR / r;
    x[1] = std::log(t / (1.0 - t));
  } else {
    x[1] = std::log(bigR);
    x[2] = std::log(r - bigR);
  }
}

// One Nelder-Mead run (GSL nmsimplex2) from x; returns the final simplex size.
double simplex_run(Objective& obj, std::vector<double>& x, double& fx, double tol, int max_iter, int& iterations) {
  const std::size_t dim = x.size();
  gsl_multimin_function f{&gsl_objective, dim, &obj};
  gsl_vector* start = gsl_vector_alloc(dim);
  gsl_vector* step = gsl_vector_alloc(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    gsl_vector_set(start, i, x[i]);
    gsl_vector_set(step, i, 0.25);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
  gsl_multimin_fminimizer_set(s, &f, start, step);
  double size = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    ++iterations;
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS)
      break;
    size = gsl_multimin_fminimizer_size(s);
    if (size < tol)
      break;
  }
  for (std::size_t i = 0; i < dim; ++i)
    x[i] = gsl_vector_get(s->x, i);
  fx = s->fval;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(start);
  gsl_vector_free(step);
  return size;
}

} // namespace

std::string branch_name(Branch b) { return b == Branch::F ? "F" : "G"; }

double branch_F(double p, double lambda, double bigR, double r) {
  require_args(p, lambda, bigR, r);
  const auto sp = sommerfeld::make_sommerfeld_params(p);
  return std::exp(log_branch(sp, Branch::F, lambda, bigR, r));
}

double branch_G(double p, double lambda, double bigR, double r) {
  require_args(p, lambda, bigR, r);
  const auto sp = sommerfeld::make_sommerfeld_params(p);
  return std::exp(log_branch(sp, Branch::G, lambda, bigR, r));
}

BranchMinimum minimize_branch(double p, Branch which, const BoundOptions& opts) {
  if (!(p > 1.5 && p < 2.0))
    throw DomainError("compute_B: p must lie in (3/2, 2)");
  if (opts.grid_lambda < 2 || opts.grid_R < 1 || opts.grid_r < 2)
    throw DomainError("compute_B: coarse grid too small");
  if (!(opts.lambda_lo > 0.0 && opts.lambda_hi < 1.0 && opts.lambda_lo < opts.lambda_hi) ||
      !(opts.R_lo > 0.0 && opts.r_lo > 0.0 && opts.r_lo < opts.r_hi))
    throw DomainError("compute_B: invalid search box");
  if (opts.fixed_r && !(*opts.fixed_r > 0.0))
    throw DomainError("compute_B: fixed r must be positive");
  gsl_set_error_handler_off();

  const auto sp = sommerfeld::make_sommerfeld_params(p);
  Objective obj{&sp, which, opts.fixed_r};

  // coarse grid
  double best = std::numeric_limits<double>::infinity();
  double bl = 0.0, bR = 0.0, br = 0.0;
  const int nr = opts.fixed_r ? 1 : opts.grid_r;
  for (int k = 0; k < nr; ++k) {
    const double r = opts.fixed_r ? *opts.fixed_r
                                  : opts.r_lo * std::pow(opts.r_hi / opts.r_lo, static_cast<double>(k) / (nr - 1));
    const double R_lo = std::min(opts.R_lo, 0.1 * r);
    for (int j = 0; j < opts.grid_R; ++j) {
      const double bigR = R_lo * std::pow(r / R_lo, (j + 0.5) / opts.grid_R);
      for (int i = 0; i < opts.grid_lambda; ++i) {
        const double lambda =
            opts.lambda_lo + (opts.lambda_hi - opts.lambda_lo) * static_cast<double>(i) / (opts.grid_lambda - 1);
        const double v = log_branch(sp, which, lambda, bigR, r);
        ++obj.evaluations;
        if (v < best) {
          best = v;
          bl = lambda;
          bR = bigR;
          br = r;
        }
      }
    }
  }
  if (!std::isfinite(best))
    throw OptimizerFailure("compute_B: coarse grid found no finite value");

  // refinement: simplex restarts until a restart no longer improves
  std::vector<double> x(opts.fixed_r ? 2 : 3);
  encode(obj, bl, bR, br, x.data());
  double fx = best;
  int iterations = 0;
  // the objective is flat to second order, so sqrt(tol) in x resolves the value to tol
  const double size_tol = std::sqrt(opts.tol);
  double size = 0.0;
  for (int restart = 0; restart < 8; ++restart) {
    const double before = fx;
    size = simplex_run(obj, x, fx, size_tol, opts.max_iter, iterations);
    if (restart > 0 && before - fx <= 1e-14 * std::abs(before))
      break;
  }
  if (!(fx <= best) || !std::isfinite(fx) || !(size < size_tol)) {
    std::ostringstream msg;
    msg << "compute_B: refinement failed at p = " << p << " (branch " << branch_name(which) << ", simplex size "
        << size << ")";
    throw OptimizerFailure(msg.str());
  }

  BranchMinimum m;
  obj.decode(x.data(), m.lambda, m.R, m.r);
  m.value = std::exp(fx);
  m.coarse_value = std::exp(best);
  m.evaluations = obj.evaluations;
  m.iterations = iterations;
  return m;
}

BoundResult compute_B(double p, const BoundOptions& opts) {
  BoundResult res;
  res.p = p;
  res.options = opts;
  res.F = minimize_branch(p, Branch::F, opts);
  res.G = minimize_branch(p, Branch::G, opts);
  res.branch = res.F.value >= res.G.value ? Branch::F : Branch::G;
  res.B = std::max(res.F.value, res.G.value);
  return res;
}

std::vector<BoundResult> bound_curve(const std::vector<double>& p_values, const BoundOptions& opts, int jobs) {
  for (double p : p_values)
    if (!(p > 1.5 && p < 2.0))
      throw DomainError("bound_curve: every p must lie in (3/2, 2)");
  const std::size_t n = p_values.size();
  std::vector<BoundResult> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = compute_B(p_values[i], opts);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back(worker);
    for (auto& t : pool)
      t.join();
  }
  for (const auto& e : errors)
    if (e)
      std::rethrow_exception(e);
  return out;
}

std::vector<double> sweep(double p_min, double p_max, int steps) {
  if (steps < 1)
    throw DomainError("sweep: steps must be positive");
  if (!(p_min > 1.5 && p_max < 2.0 && p_min <= p_max))
    throw DomainError("sweep: window must lie inside (3/2, 2)");
  std::vector<double> ps(steps);
  for (int i = 0; i < steps; ++i)
    ps[i] = steps == 1 ? p_min : p_min + (p_max - p_min) * static_cast<double>(i) / (steps - 1);
  return ps;
}

double restore_units(double B, double p, double bigA, double gamma) {
  if (!(p > 1.5))
    throw DomainError("restore_units: p must exceed 3/2");
  return B * model::scaling_constants(p, bigA, gamma).c_p;
}

double molecular_bound(double B, int K) {
  if (K < 1)
    throw DomainError("molecular_bound: K must be at least 1");
  return B * K;
}

void write_curve_csv(const std::string& path, const std::vector<BoundResult>& curve) {
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error("cannot write " + path);
  os << "p,B,branch,lambda,R,r\n" << std::setprecision(17);
  for (const auto& b : curve) {
    const auto& m = b.branch == Branch::F ? b.F : b.G;
    os << b.p << ',' << b.B << ',' << branch_name(b.branch) << ',' << m.lambda << ',' << m.R << ',' << m.r << '\n';
  }
}

} // namespace tfwlab::bounds
