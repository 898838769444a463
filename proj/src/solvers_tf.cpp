#include "tfwlab/solvers.hpp"

#include "tfwlab/errors.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <utility>

namespace tfwlab::solvers {

namespace {

using Real = long double;
constexpr Real kFourPi = 4.0L * 3.141592653589793238462643383279502884L;

enum class Fate { Overshoot, Undershoot, Unresolved };

struct Shot {
  Fate fate = Fate::Unresolved;
  std::vector<Real> u; // values at grid nodes j0, j0+1, ... before the fate is sealed
  std::vector<Real> v;
};

// u'' = 4 pi r (u+/r)^q integrated in t = ln r with RK4. Overshoot: u < 0;
// undershoot: u' > 0 (u then grows without bound).
class TFShooter {
public:
  TFShooter(double p, const radial::RadialGrid& g, const SolverOptions& opts)
      : q_(1.0L / (static_cast<Real>(p) - 1.0L)), g_(g), m_(std::max(1, opts.tf_substeps)) {
    const std::size_t n = g.size();
    t0_ = std::log(static_cast<Real>(g.r_min()));
    h_ = (std::log(static_cast<Real>(g.r_max())) - t0_) / static_cast<Real>(n - 1);
    extra_ = static_cast<std::size_t>(std::ceil(std::log(static_cast<Real>(opts.tf_horizon)) / h_));
  }

  Shot fire(std::size_t j0, Real u, Real v, bool record) const {
    Shot s;
    const std::size_t n = g_.size();
    const std::size_t total = n - 1 + extra_;
    if (record) {
      s.u.push_back(u);
      s.v.push_back(v);
    }
    const Real dt = h_ / static_cast<Real>(m_);
    for (std::size_t i = j0; i < total; ++i) {
      for (int k = 0; k < m_; ++k) {
        const Real t = t0_ + static_cast<Real>(i) * h_ + static_cast<Real>(k) * dt;
        step(t, dt, u, v);
        if (u < 0.0L) {
          s.fate = Fate::Overshoot;
          return s;
        }
        if (v > 0.0L) {
          s.fate = Fate::Undershoot;
          return s;
        }
      }
      if (record && i + 1 < n) {
        s.u.push_back(u);
        s.v.push_back(v);
      }
    }
    return s;
  }

private:
  void rhs(Real t, Real u, Real v, Real& du, Real& dv) const {
    const Real r = std::exp(t);
    du = r * v;
    dv = u > 0.0L ? kFourPi * std::pow(r, 2.0L - q_) * std::pow(u, q_) : 0.0L;
  }

  void step(Real t, Real dt, Real& u, Real& v) const {
    Real k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
    rhs(t, u, v, k1u, k1v);
    rhs(t + dt / 2, u + dt / 2 * k1u, v + dt / 2 * k1v, k2u, k2v);
    rhs(t + dt / 2, u + dt / 2 * k2u, v + dt / 2 * k2v, k3u, k3v);
    rhs(t + dt, u + dt * k3u, v + dt * k3v, k4u, k4v);
    u += dt / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
    v += dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }

  Real q_;
  const radial::RadialGrid& g_;
  int m_;
  Real t0_;
  Real h_;
  std::size_t extra_;
};

} // namespace

TFSolution solve_tf(const ModelParams& params, GridPtr grid, const SolverOptions& opts) {
  params.validate();
  if (params.K != 1)
    throw DomainError("solve_tf: atomic solver requires K = 1");
  if (!(params.p > 1.5 && params.p < 2.0))
    throw DomainError("solve_tf: p must lie in (3/2, 2)");
  if (!grid || grid->size() < 16)
    throw DomainError("solve_tf: grid needs at least 16 nodes");
  const auto& g = *grid;
  const std::size_t n = g.size();
  const TFShooter shooter(params.p, g, opts);

  const Real Z = params.Z;
  const Real q = 1.0L / (static_cast<Real>(params.p) - 1.0L);
  const Real r0 = g.r_min();
  // u = Z + s r + c r^{3-q} + ... near the nucleus
  const Real c = kFourPi * std::pow(Z, q) / ((2.0L - q) * (3.0L - q));

  std::vector<Real> u_acc(n), v_acc(n);
  std::size_t j0 = 0;
  Real u_start = 0.0L;
  Real lo = -Z, hi = 0.0L;
  double first_slope = 0.0;
  int segments = 0, bisections = 0;

  auto state = [&](Real s) -> std::pair<Real, Real> {
    if (j0 == 0)
      return {Z + s * r0 + c * std::pow(r0, 3.0L - q), s + c * (3.0L - q) * std::pow(r0, 2.0L - q)};
    return {u_start, s};
  };
  auto fate = [&](Real s) {
    const auto [u, v] = state(s);
    return shooter.fire(j0, u, v, false).fate;
  };

  while (true) {
    if (++segments > opts.tf_max_segments)
      throw NonConvergence("solve_tf: too many shooting segments", 0.0, 0.0, bisections);
    // bracket: lo overshoots, hi undershoots
    Real width = std::max(hi - lo, std::abs(lo) * 1e-12L);
    for (int k = 0; fate(lo) != Fate::Overshoot; ++k) {
      if (k > 200)
        throw NonConvergence("solve_tf: no overshooting slope found", 0.0, 0.0, bisections);
      lo -= width;
      width *= 2;
    }
    width = std::max(hi - lo, std::abs(lo) * 1e-12L);
    for (int k = 0; fate(hi) != Fate::Undershoot; ++k) {
      if (k > 200)
        throw NonConvergence("solve_tf: no undershooting slope found", 0.0, 0.0, bisections);
      hi += width;
      width *= 2;
    }
    bool settled = false;
    for (int k = 0; k < 400; ++k) {
      const Real mid = lo + (hi - lo) / 2;
      if (mid <= lo || mid >= hi)
        break;
      ++bisections;
      const Fate f = fate(mid);
      if (f == Fate::Overshoot)
        lo = mid;
      else if (f == Fate::Undershoot)
        hi = mid;
      else {
        lo = hi = mid;
        settled = true;
        break;
      }
    }
    if (j0 == 0)
      first_slope = static_cast<double>(lo + (hi - lo) / 2);

    const auto [ul, vl] = state(lo);
    const auto [uh, vh] = state(hi);
    const Shot a = shooter.fire(j0, ul, vl, true);
    const Shot b = settled ? a : shooter.fire(j0, uh, vh, true);
    const std::size_t len = std::min(a.u.size(), b.u.size());
    std::size_t good = 0;
    while (good < len) {
      const Real mean = (a.u[good] + b.u[good]) / 2;
      if (std::abs(a.u[good] - b.u[good]) > static_cast<Real>(opts.tf_separation_tol) * std::abs(mean))
        break;
      u_acc[j0 + good] = mean;
      v_acc[j0 + good] = (a.v[good] + b.v[good]) / 2;
      ++good;
    }
    if (j0 + good >= n)
      break;
    if (good < 2) {
      std::ostringstream msg;
      msg << "solve_tf: shooting stalled at r = " << g.r(j0) << " (slope bracket [" << static_cast<double>(lo)
          << ", " << static_cast<double>(hi) << "])";
      throw NonConvergence(msg.str(), static_cast<double>(hi - lo), 0.0, bisections);
    }
    const std::size_t j1 = j0 + good - 1;
    lo = a.v[good - 1];
    hi = b.v[good - 1];
    if (lo > hi)
      std::swap(lo, hi);
    u_start = u_acc[j1];
    j0 = j1;
  }

  std::vector<double> phi(n), rho(n);
  const double qd = static_cast<double>(q);
  for (std::size_t i = 0; i < n; ++i) {
    phi[i] = std::max(static_cast<double>(u_acc[i] / static_cast<Real>(g.r(i))), 0.0);
    rho[i] = phi[i] > 0.0 ? std::pow(phi[i], qd) : 0.0;
  }
  TFSolution sol{params, RadialProfile(grid, std::move(phi)), RadialProfile(grid, std::move(rho))};
  sol.N = radial::integrate_density(sol.rho);
  sol.slope = first_slope;
  sol.segments = segments;
  sol.bisections = bisections;
  return sol;
}

} // namespace tfwlab::solvers
