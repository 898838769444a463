#include "tfwlab/solvers.hpp"

#include "tfwlab/errors.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tfwlab::solvers {

using model::kPi;

namespace {

void require_tfw_params(const ModelParams& prm) {
  prm.validate();
  if (prm.K != 1)
    throw DomainError("solve_tfw: atomic solver requires K = 1");
  if (!(prm.p >= 1.5 && prm.p < 2.0))
    throw DomainError("solve_tfw: p must lie in [3/2, 2)");
}

double positive_pow(double x, double e) { return x > 0.0 ? std::pow(x, e) : 0.0; }

// Discrete Euler operator: cusp row at r_min, three-point interior rows, Robin row at r_max.
class EulerOperator {
public:
  EulerOperator(const ModelParams& prm, const radial::RadialGrid& g) : prm_(prm), g_(g) {
    const std::size_t n = g.size();
    st_.resize(n);
    for (std::size_t i = 1; i + 1 < n; ++i)
      st_[i] = radial::laplacian_stencil(g, i);
    e_ = 2.0 * prm.p - 2.0;
    cusp_ = prm.Z * (g.r(1) - g.r(0)) / (4.0 * prm.bigA);
  }

  std::size_t size() const { return g_.size(); }
  const radial::Stencil& stencil(std::size_t i) const { return st_[i]; }
  double exponent() const { return e_; }
  double cusp() const { return cusp_; }

  // Robin coefficient at r_max for u = r psi with u'/u = (1 - sqrt(1 + 4 r^2 W / A)) / (2r),
  // W = gamma psi^{2p-2} - phi lagged on the current iterate. This is exact for both
  // power-law tails (W ~ w/r^2) and exponential tails (W ~ const).
  double robin(double psi_last, double phi_last) const {
    const std::size_t n = size();
    const double rm = 0.5 * (g_.r(n - 1) + g_.r(n - 2));
    const double w = std::max(prm_.gamma * positive_pow(psi_last, e_) - phi_last, 0.0) / prm_.bigA;
    const double decay = (std::sqrt(1.0 + 4.0 * rm * rm * w) - 1.0) / (2.0 * rm);
    return (decay + 1.0 / rm) * (g_.r(n - 1) - g_.r(n - 2)) / 2.0;
  }

  double interior(std::size_t i, const std::vector<double>& psi, double phi) const {
    const double lap = radial::apply_stencil(st_[i], psi[i - 1], psi[i], psi[i + 1]);
    return -prm_.bigA * lap + (prm_.gamma * positive_pow(psi[i], e_) - phi) * psi[i];
  }

  double interior_slope(std::size_t i, double psi, double phi) const {
    return -prm_.bigA * st_[i].diag + (2.0 * prm_.p - 1.0) * prm_.gamma * positive_pow(psi, e_) - phi;
  }

private:
  ModelParams prm_;
  const radial::RadialGrid& g_;
  std::vector<radial::Stencil> st_;
  double e_;
  double cusp_;
};

// Tridiagonal solve, overwriting d with the solution.
void thomas(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c, std::vector<double>& d) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

// Maximal solution of the Euler equation for fixed phi. Newton from the
// supersolution 2 (Z/(gamma r))^{1/(2p-2)} decreases monotonically.
std::vector<double> solve_linearized_shell(const EulerOperator& op, const ModelParams& prm,
                                           const radial::RadialGrid& g, const std::vector<double>& phi,
                                           int max_inner) {
  const std::size_t n = g.size();
  const double e = op.exponent();
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i)
    psi[i] = 2.0 * std::pow(prm.Z / (prm.gamma * g.r(i)), 1.0 / e);

  std::vector<double> a(n), b(n), c(n), d(n);
  const double k = op.cusp();
  for (int it = 0; it < max_inner; ++it) {
    b[0] = 1.0 - k;
    c[0] = -(1.0 + k);
    d[0] = -(b[0] * psi[0] + c[0] * psi[1]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const auto& s = op.stencil(i);
      a[i] = -prm.bigA * s.lower;
      b[i] = op.interior_slope(i, psi[i], phi[i]);
      c[i] = -prm.bigA * s.upper;
      d[i] = -op.interior(i, psi, phi[i]);
    }
    const double cr = op.robin(psi[n - 1], phi[n - 1]);
    a[n - 1] = -(1.0 - cr);
    b[n - 1] = 1.0 + cr;
    d[n - 1] = -(b[n - 1] * psi[n - 1] + a[n - 1] * psi[n - 2]);
    thomas(a, b, c, d);
    double change = 0.0, top = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = std::max(psi[i] + d[i], 0.0);
      change = std::max(change, std::abs(next - psi[i]));
      psi[i] = next;
      top = std::max(top, psi[i]);
    }
    if (top == 0.0 || change <= 1e-10 * top)
      break;
  }
  return psi;
}

std::vector<double> mean_field(const ModelParams& prm, const radial::GridPtr& grid, const std::vector<double>& psi) {
  std::vector<double> rho(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    rho[i] = psi[i] * psi[i];
  // tail adequacy is checked once on the final solution
  const auto parts = radial::hartree_parts(RadialProfile(grid, std::move(rho)));
  std::vector<double> phi(psi.size());
  for (std::size_t i = 0; i < phi.size(); ++i)
    phi[i] = prm.Z / grid->r(i) - (parts.inner[i] / grid->r(i) + parts.outer[i]);
  return phi;
}

// Newton on the full discrete system with unknowns (psi_i, I_i, O_i), where I and O
// are the cumulative Hartree sums of radial::hartree_parts. Returns false when the
// iteration fails to reduce the residual.
bool coupled_newton(const EulerOperator& op, const ModelParams& prm, const radial::GridPtr& grid,
                    std::vector<double>& psi, int max_newton, int& iterations) {
  const auto& g = *grid;
  const std::size_t n = g.size();
  const double h = g.log_step();
  const double k = op.cusp();
  const std::size_t m = 3 * n;
  auto P = [](std::size_t i) { return 3 * i; };
  auto I = [](std::size_t i) { return 3 * i + 1; };
  auto O = [](std::size_t i) { return 3 * i + 2; };

  std::vector<double> scale(n);
  for (std::size_t i = 0; i < n; ++i)
    scale[i] = g.r(i) * g.r(i) * h * h / prm.bigA;

  Eigen::VectorXd x(m);
  {
    std::vector<double> rho(n);
    for (std::size_t i = 0; i < n; ++i)
      rho[i] = psi[i] * psi[i];
    const auto parts = radial::hartree_parts(RadialProfile(grid, rho));
    for (std::size_t i = 0; i < n; ++i) {
      x[P(i)] = psi[i];
      x[I(i)] = parts.inner[i];
      x[O(i)] = parts.outer[i];
    }
  }

  auto residual = [&](const Eigen::VectorXd& v, Eigen::VectorXd& res) {
    std::vector<double> ps(n);
    for (std::size_t i = 0; i < n; ++i)
      ps[i] = v[P(i)];
    res.resize(m);
    res[P(0)] = (1.0 - k) * ps[0] - (1.0 + k) * ps[1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double phi = prm.Z / g.r(i) - v[I(i)] / g.r(i) - v[O(i)];
      res[P(i)] = scale[i] * op.interior(i, ps, phi);
    }
    const double phil = prm.Z / g.r(n - 1) - v[I(n - 1)] / g.r(n - 1) - v[O(n - 1)];
    const double cr = op.robin(ps[n - 1], phil);
    res[P(n - 1)] = (1.0 + cr) * ps[n - 1] - (1.0 - cr) * ps[n - 2];
    auto gi = [&](std::size_t i) { const double r = g.r(i); return 4.0 * kPi * r * r * r * ps[i] * ps[i]; };
    auto ko = [&](std::size_t i) { const double r = g.r(i); return 4.0 * kPi * r * r * ps[i] * ps[i]; };
    res[I(0)] = v[I(0)] - gi(0) / 3.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
      res[I(i + 1)] = v[I(i + 1)] - v[I(i)] - 0.5 * h * (gi(i) + gi(i + 1));
    res[O(n - 1)] = v[O(n - 1)];
    for (std::size_t i = 0; i + 1 < n; ++i)
      res[O(i)] = v[O(i)] - v[O(i + 1)] - 0.5 * h * (ko(i) + ko(i + 1));
    return cr;
  };

  Eigen::VectorXd res;
  double cr = residual(x, res);
  double norm = res.lpNorm<Eigen::Infinity>();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(12 * n);

  bool converged = false;
  for (int it = 0; it < max_newton; ++it) {
    trips.clear();
    trips.emplace_back(P(0), P(0), 1.0 - k);
    trips.emplace_back(P(0), P(1), -(1.0 + k));
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const auto& s = op.stencil(i);
      const double r = g.r(i);
      const double ps = x[P(i)];
      const double phi = prm.Z / r - x[I(i)] / r - x[O(i)];
      trips.emplace_back(P(i), P(i - 1), -scale[i] * prm.bigA * s.lower);
      trips.emplace_back(P(i), P(i), scale[i] * op.interior_slope(i, ps, phi));
      trips.emplace_back(P(i), P(i + 1), -scale[i] * prm.bigA * s.upper);
      trips.emplace_back(P(i), I(i), scale[i] * ps / r);
      trips.emplace_back(P(i), O(i), scale[i] * ps);
    }
    trips.emplace_back(P(n - 1), P(n - 1), 1.0 + cr);
    trips.emplace_back(P(n - 1), P(n - 2), -(1.0 - cr));
    auto dg = [&](std::size_t i) { const double r = g.r(i); return 8.0 * kPi * r * r * r * x[P(i)]; };
    auto dk = [&](std::size_t i) { const double r = g.r(i); return 8.0 * kPi * r * r * x[P(i)]; };
    trips.emplace_back(I(0), I(0), 1.0);
    trips.emplace_back(I(0), P(0), -dg(0) / 3.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      trips.emplace_back(I(i + 1), I(i + 1), 1.0);
      trips.emplace_back(I(i + 1), I(i), -1.0);
      trips.emplace_back(I(i + 1), P(i), -0.5 * h * dg(i));
      trips.emplace_back(I(i + 1), P(i + 1), -0.5 * h * dg(i + 1));
    }
    trips.emplace_back(O(n - 1), O(n - 1), 1.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      trips.emplace_back(O(i), O(i), 1.0);
      trips.emplace_back(O(i), O(i + 1), -1.0);
      trips.emplace_back(O(i), P(i), -0.5 * h * dk(i));
      trips.emplace_back(O(i), P(i + 1), -0.5 * h * dk(i + 1));
    }
    Eigen::SparseMatrix<double> J(m, m);
    J.setFromTriplets(trips.begin(), trips.end());
    if (it == 0)
      lu.analyzePattern(J);
    lu.factorize(J);
    if (lu.info() != Eigen::Success)
      return false;
    const Eigen::VectorXd dx = lu.solve(-res);
    ++iterations;

    double step = 1.0;
    Eigen::VectorXd trial(m), trial_res;
    double trial_norm = 0.0, trial_cr = cr;
    bool accepted = false;
    for (int ls = 0; ls < 12; ++ls, step *= 0.5) {
      trial = x + step * dx;
      for (std::size_t i = 0; i < n; ++i)
        trial[P(i)] = std::max(trial[P(i)], 0.0);
      trial_cr = residual(trial, trial_res);
      trial_norm = trial_res.lpNorm<Eigen::Infinity>();
      if (trial_norm < norm || trial_norm <= 1e-14) {
        accepted = true;
        break;
      }
    }
    // largest relative size of the full Newton step over nodes that have not underflowed;
    // a damped step says nothing about convergence
    double rel = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (x[P(i)] > 1e-250)
        rel = std::max(rel, std::abs(dx[P(i)]) / x[P(i)]);
    if (!accepted) {
      // Round-off floor: accept the current point if the last step was already tiny.
      if (rel > 1e-9)
        return false;
      converged = true;
      break;
    }
    x = trial;
    res = trial_res;
    norm = trial_norm;
    cr = trial_cr;
    if (step == 1.0 && rel <= 1e-12) {
      converged = true;
      break;
    }
  }
  if (!converged)
    return false;
  for (std::size_t i = 0; i < n; ++i)
    psi[i] = x[P(i)];
  return true;
}

} // namespace

RadialProfile TFWSolution::rho() const {
  std::vector<double> v(psi.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = psi[i] * psi[i];
  return RadialProfile(psi.grid_ptr(), std::move(v));
}

RadialProfile TFWSolution::P() const { return radial::p_function(psi, phi, params.bigA); }

GridPtr default_grid(const ModelParams& params, std::size_t n) {
  params.validate();
  const double r_max = params.p <= 1.5 ? 1e6 : 1e4;
  return radial::make_grid(1e-4 / params.Z, r_max, n);
}

double euler_residual(const RadialProfile& psi, const RadialProfile& phi, const ModelParams& prm) {
  radial::require_same_grid(psi, phi);
  const auto& g = psi.grid();
  const std::size_t n = g.size();
  const double e = 2.0 * prm.p - 2.0;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double lap = radial::apply_stencil(radial::laplacian_stencil(g, i), psi[i - 1], psi[i], psi[i + 1]);
    const double r = -prm.bigA * lap + (prm.gamma * positive_pow(psi[i], e) - phi[i]) * psi[i];
    num = std::max(num, std::abs(r));
    den = std::max(den, std::abs(phi[i] * psi[i]));
  }
  if (num == 0.0)
    return 0.0;
  return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}

EnergyTerms energy_terms(const RadialProfile& psi, const ModelParams& prm) {
  const auto& g = psi.grid();
  const std::size_t n = g.size();
  const auto dpsi = radial::derivative(psi);
  std::vector<double> grad2(n), tf(n), att(n), rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    grad2[i] = dpsi[i] * dpsi[i];
    tf[i] = positive_pow(psi[i], 2.0 * prm.p);
    rho[i] = psi[i] * psi[i];
    att[i] = prm.Z / g.r(i) * rho[i];
  }
  const RadialProfile rp(psi.grid_ptr(), rho);
  const auto H = radial::hartree_potential(rp);
  std::vector<double> rep(n);
  for (std::size_t i = 0; i < n; ++i)
    rep[i] = rho[i] * H[i];
  const double r0 = g.r_min();
  EnergyTerms t;
  t.kinetic = prm.bigA * radial::integrate_volume(RadialProfile(psi.grid_ptr(), grad2));
  t.tf = prm.gamma / prm.p * radial::integrate_volume(RadialProfile(psi.grid_ptr(), tf));
  t.attraction = radial::integrate_volume(RadialProfile(psi.grid_ptr(), att)) + 2.0 * kPi * prm.Z * r0 * r0 * rho[0];
  t.repulsion = 0.5 * radial::integrate_volume(RadialProfile(psi.grid_ptr(), rep));
  return t;
}

TFWSolution make_tfw_solution(const ModelParams& params, RadialProfile psi, RadialProfile phi, int iterations,
                              double scf_update) {
  radial::require_same_grid(psi, phi);
  TFWSolution s{params, std::move(psi), std::move(phi), {}};
  s.terms = energy_terms(s.psi, params);
  s.N = radial::integrate_density(s.rho());
  s.Q = s.N - params.Z;
  s.euler_residual = euler_residual(s.psi, s.phi, params);
  s.iterations = iterations;
  s.scf_update = scf_update;
  return s;
}

TFWSolution solve_tfw(const ModelParams& params, GridPtr grid, const SolverOptions& opts) {
  require_tfw_params(params);
  if (!grid || grid->size() < 16)
    throw DomainError("solve_tfw: grid needs at least 16 nodes");
  const auto& g = *grid;
  const std::size_t n = g.size();
  const EulerOperator op(params, g);

  // Start from the field of a neutral cloud rho = Z mu^3/(8 pi) e^{-mu r}:
  // phi = Z e^{-mu r} (1/r + mu/2).
  const double mu = 0.3 * params.Z / params.bigA;
  std::vector<double> phi(n), psi;
  for (std::size_t i = 0; i < n; ++i)
    phi[i] = params.Z * std::exp(-mu * g.r(i)) * (1.0 / g.r(i) + 0.5 * mu);

  double alpha = opts.mixing;
  double prev = std::numeric_limits<double>::infinity();
  double update = prev;
  int iterations = 0;
  bool polished = false;
  for (int it = 0; it < opts.max_iterations; ++it) {
    psi = solve_linearized_shell(op, params, g, phi, opts.max_inner);
    const auto fresh = mean_field(params, grid, psi);
    update = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      update = std::max(update, std::abs(fresh[i] - phi[i]));
    update /= params.Z;
    ++iterations;
    if (update <= opts.scf_tol) {
      phi = fresh;
      break;
    }
    if (opts.newton_polish && update <= opts.polish_switch) {
      std::vector<double> trial = psi;
      int newton_its = 0;
      if (coupled_newton(op, params, grid, trial, opts.max_newton, newton_its)) {
        iterations += newton_its;
        psi = std::move(trial);
        phi = mean_field(params, grid, psi);
        update = 0.0;
        polished = true;
        break;
      }
    }
    if (update > prev)
      alpha = std::max(0.5 * alpha, 0.01);
    else
      alpha = std::min(1.1 * alpha, opts.mixing);
    prev = update;
    for (std::size_t i = 0; i < n; ++i)
      phi[i] += alpha * (fresh[i] - phi[i]);
  }
  if (!polished && update > opts.scf_tol) {
    std::ostringstream msg;
    msg << "solve_tfw: no self-consistency after " << iterations << " iterations (update " << update << ")";
    throw NonConvergence(msg.str(), update, std::numeric_limits<double>::quiet_NaN(), iterations);
  }
  if (!polished)
    psi = solve_linearized_shell(op, params, g, phi, opts.max_inner);

  auto sol = make_tfw_solution(params, RadialProfile(grid, psi), RadialProfile(grid, phi), iterations, update);
  if (!(sol.euler_residual <= opts.euler_tol)) {
    std::ostringstream msg;
    msg << "solve_tfw: Euler residual " << sol.euler_residual << " exceeds " << opts.euler_tol;
    throw NonConvergence(msg.str(), update, sol.euler_residual, iterations);
  }
  return sol;
}

} // namespace tfwlab::solvers
