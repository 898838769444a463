#include "tfwlab/verify.hpp"

#include "tfwlab/errors.hpp"
#include "tfwlab/model.hpp"
#include "tfwlab/radial.hpp"
#include "tfwlab/sommerfeld.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace tfwlab::verify {

using model::kPi;
using radial::RadialProfile;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Accumulates the worst excess of f_i - g_i over a per-node allowance.
struct Worst {
  double violation = 0.0;
  double location = kNaN;

  void add(double excess, double allowance, double r) {
    const double v = excess - allowance;
    if (std::isnan(v)) {
      violation = std::numeric_limits<double>::infinity();
      location = r;
    } else if (v > violation) {
      violation = v;
      location = r;
    }
  }
};

CheckReport leaf(std::string name, const Worst& w, double tol, std::string detail = {}) {
  CheckReport c;
  c.name = std::move(name);
  c.violation = w.violation;
  c.location = w.location;
  c.tolerance = tol;
  c.pass = w.violation <= tol;
  c.detail = std::move(detail);
  return c;
}

CheckReport skipped(std::string name, std::string why) {
  CheckReport c;
  c.name = std::move(name);
  c.location = kNaN;
  c.detail = "not applicable: " + why;
  return c;
}

// Headline = the part with the largest violation/tolerance ratio.
CheckReport combine(std::string name, std::vector<CheckReport> parts) {
  CheckReport c;
  c.name = std::move(name);
  c.location = kNaN;
  double worst = -1.0;
  for (const auto& p : parts) {
    c.pass = c.pass && p.pass;
    const double ratio = p.tolerance > 0.0 ? p.violation / p.tolerance
                         : p.violation > 0.0 ? std::numeric_limits<double>::infinity()
                                             : 0.0;
    if (ratio > worst) {
      worst = ratio;
      c.violation = p.violation;
      c.location = p.location;
      c.tolerance = p.tolerance;
      c.detail = "worst part: " + p.name;
    }
  }
  c.parts = std::move(parts);
  return c;
}

CheckReport convergence_gate(const TFWSolution& sol, const VerifyOptions& o) {
  Worst w;
  w.add(sol.euler_residual, 0.0, kNaN);
  return leaf("converged", w, o.euler_tol, "euler_residual of the profiles");
}

double h2(const RadialProfile& f) {
  const double h = f.grid().log_step();
  return h * h;
}

double pos_pow(double x, double e) { return x > 0.0 ? std::pow(x, e) : 0.0; }

bool in_window(double p) { return p > 1.5 && p < 2.0; }

} // namespace

CheckReport check_subharmonic_P(const TFWSolution& sol, const VerifyOptions& o) {
  const RadialProfile P = sol.P();
  const auto& g = P.grid();
  const std::size_t n = g.size();
  const auto lap = radial::laplacian_radial(P);
  const double slack = o.rel_tol + o.h2_slack * h2(P);
  std::vector<double> rp(n);
  double rp_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rp[i] = g.r(i) * P[i];
    rp_max = std::max(rp_max, std::abs(rp[i]));
  }

  Worst a, b, c, d;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double r = g.r(i);
    a.add(-lap.values[i], slack * P[i] / (r * r), r);
    const double rl = g.r(i - 1), ru = g.r(i + 1);
    const double d2 = 2.0 * ((rp[i + 1] - rp[i]) / (ru - r) - (rp[i] - rp[i - 1]) / (r - rl)) / (ru - rl);
    c.add(-d2, slack * P[i] / r, r);
  }
  for (std::size_t i = 0; i + 1 < n; ++i)
    b.add(rp[i + 1] - rp[i], o.rel_tol * rp_max, g.r(i + 1));
  for (std::size_t i = 0; i < n; ++i)
    d.add(sol.Q - rp[i], o.charge_slack * sol.params.Z, g.r(i));

  return combine("subharmonic_P", {convergence_gate(sol, o),
                                   leaf("laplacian_nonnegative", a, o.abs_tol, "-Lap P beyond slack * P/r^2"),
                                   leaf("rP_nonincreasing", b, o.abs_tol, "rise of rP between nodes"),
                                   leaf("rP_convex", c, o.abs_tol, "-(rP)'' beyond slack * P/r"),
                                   leaf("rP_above_Q", d, o.abs_tol, "Q - rP")});
}

CheckReport check_lemma_g1(const TFWSolution& sol, const VerifyOptions& o) {
  const auto& prm = sol.params;
  if (prm.p < 1.5)
    return skipped("lemma_g1", "requires p >= 3/2");
  const auto& g = sol.psi.grid();
  Worst w;
  for (std::size_t i = 0; i < g.size(); ++i)
    w.add(pos_pow(sol.psi[i], 2.0 * prm.p - 2.0) - prm.Z / (prm.gamma * g.r(i)), 0.0, g.r(i));
  return combine("lemma_g1", {convergence_gate(sol, o), leaf("psi_power_below_V", w, o.abs_tol,
                                                               "psi^(2p-2) - Z/(gamma r)")});
}

CheckReport check_t1(const TFWSolution& sol, const std::vector<double>& lambdas, const VerifyOptions& o) {
  const auto& prm = sol.params;
  if (!in_window(prm.p))
    return skipped("t1", "requires 3/2 < p < 2");
  const auto& g = sol.psi.grid();
  const double p = prm.p;
  // restores A and gamma in the constant: c_p(lambda) A^{(p-1)/(2p-3)} gamma^{1/(3-2p)}
  const double unit = std::pow(prm.bigA, (p - 1.0) / (2.0 * p - 3.0)) * std::pow(prm.gamma, 1.0 / (3.0 - 2.0 * p));
  std::vector<CheckReport> parts{convergence_gate(sol, o)};
  for (double lambda : lambdas) {
    if (!(lambda > 0.0 && lambda < 1.0))
      throw DomainError("check_t1: lambda must lie in (0, 1)");
    const double c = model::c_lambda(p, lambda) * unit;
    Worst w;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double lhs = lambda * prm.gamma * pos_pow(sol.psi[i], 2.0 * p - 2.0);
      const double rhs = sol.phi[i] + c;
      w.add(lhs - rhs, o.rel_tol * (std::abs(sol.phi[i]) + c), g.r(i));
    }
    std::ostringstream name;
    name << "lambda=" << lambda;
    parts.push_back(leaf(name.str(), w, o.abs_tol, "lambda gamma psi^(2p-2) - phi - c"));
  }
  const double cap = model::psi_cap_nonpositive_phi(p) * std::pow(prm.gamma, 1.0 / (3.0 - 2.0 * p)) *
                     std::pow(prm.bigA, 1.0 / (2.0 * (2.0 * p - 3.0)));
  Worst w;
  int nodes = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (sol.phi[i] <= 0.0) {
      ++nodes;
      w.add(sol.psi[i] - cap, o.rel_tol * cap, g.r(i));
    }
  parts.push_back(leaf("cap_where_phi_nonpositive", w, o.abs_tol,
                       std::to_string(nodes) + " nodes with phi <= 0"));
  return combine("t1", std::move(parts));
}

CheckReport check_z0(const TFWSolution& sol, const std::vector<double>& radii, const VerifyOptions& o) {
  const auto& prm = sol.params;
  if (!in_window(prm.p))
    return skipped("z0", "requires 3/2 < p < 2");
  const auto sp = sommerfeld::make_sommerfeld_params(prm.p);
  const auto& g = sol.phi.grid();
  // s_{p,R} for coupling gamma scales by gamma^{1/(2-p)}; the ball term by A
  const double gscale = std::pow(prm.gamma, 1.0 / (2.0 - prm.p));
  std::vector<CheckReport> parts{convergence_gate(sol, o)};
  for (double R : radii) {
    if (!(R > 0.0))
      throw DomainError("check_z0: R must be positive");
    Worst w;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = g.r(i);
      if (r <= R)
        continue;
      const double bound = prm.bigA * kPi * kPi / (R * R) + gscale * sommerfeld::s_pR(sp, R, r);
      w.add(sol.phi[i] - bound, o.rel_tol * bound, r);
    }
    std::ostringstream name;
    name << "R=" << R;
    parts.push_back(leaf(name.str(), w, o.abs_tol, "phi - pi^2/R^2 - s_pR"));
  }
  return combine("z0", std::move(parts));
}

CheckReport check_tf_sommerfeld(const TFSolution& sol, double bigR, const VerifyOptions& o) {
  const double p = sol.params.p;
  if (!in_window(p))
    return skipped("tf_sommerfeld", "requires 3/2 < p < 2");
  const auto sp = sommerfeld::make_sommerfeld_params(p);
  const auto& g = sol.phi.grid();
  if (!(bigR > g.r_min() && bigR < g.r_max()))
    throw DomainError("check_tf_sommerfeld: R must lie inside the grid");
  // R snaps to the nearest node so phi(R) is a grid value
  const auto& nodes = g.nodes();
  std::size_t iR = std::lower_bound(nodes.begin(), nodes.end(), bigR) - nodes.begin();
  if (iR > 0 && std::log(nodes[iR] / bigR) > std::log(bigR / nodes[iR - 1]))
    --iR;
  const double R = nodes[iR];
  const double phiR = sol.phi[iR];

  Worst a, lo, hi, c;
  double remainder = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.r(i);
    const double s = sommerfeld::s_p(sp, r);
    a.add(sol.phi[i] - s, o.rel_tol * s, r);
    if (sol.phi[i] > 0.0 && r >= 10.0)
      remainder = std::max(remainder, std::abs(sol.phi[i] / s - 1.0) * std::pow(r, sp.zeta));
  }
  std::ostringstream detail;
  double kp = kNaN, km = kNaN;
  std::vector<CheckReport> parts;
  parts.push_back(leaf("below_S_p", a, o.abs_tol, "phi - S_p"));
  try {
    kp = sommerfeld::match_k_plus(sp, R, phiR);
    km = sommerfeld::match_k_minus(sp, R, phiR);
    for (std::size_t i = iR + 1; i < g.size(); ++i) {
      const double r = g.r(i);
      const double up = sommerfeld::omega_plus(sp, kp, r);
      const double down = sommerfeld::omega_minus(sp, km, r);
      hi.add(sol.phi[i] - up, o.rel_tol * up, r);
      lo.add(down - sol.phi[i], o.rel_tol * down, r);
      const double m = sommerfeld::sigma_min_bound(sp, R, kp, r);
      c.add(sol.phi[i] - m, o.rel_tol * m, r);
    }
    detail << "R=" << R << " k+=" << kp << " k-=" << km;
    parts.push_back(leaf("below_omega_plus", hi, o.abs_tol, detail.str()));
    parts.push_back(leaf("above_omega_minus", lo, o.abs_tol, detail.str()));
    parts.push_back(leaf("below_sigma_p", c, o.abs_tol, detail.str()));
  } catch (const BoundaryMatchFailure& e) {
    Worst fail;
    fail.add(std::numeric_limits<double>::infinity(), 0.0, R);
    parts.push_back(leaf("boundary_match", fail, o.abs_tol, e.what()));
  }
  auto out = combine("tf_sommerfeld", std::move(parts));
  std::ostringstream rem;
  rem << "; remainder sup |phi/S_p - 1| r^zeta over r >= 10: " << remainder;
  out.detail += rem.str();
  return out;
}

CheckReport check_virial(const TFWSolution& sol, const VerifyOptions& o) {
  const auto v = model::virial_residuals(sol.terms, sol.params.p);
  const double scale = sol.terms.magnitude();
  const double tol = 1e-3 * scale;
  Worst w1, w2, w3, k;
  w1.add(std::abs(v.r1), 0.0, sol.params.p);
  w2.add(std::abs(v.r2), 0.0, sol.params.p);
  w3.add(std::abs(v.r3), 0.0, sol.params.p);
  std::vector<CheckReport> parts{convergence_gate(sol, o), leaf("r1", w1, tol), leaf("r2", w2, tol),
                                 leaf("r3", w3, tol)};
  if (v.kinetic_bound_applies) {
    k.add(3.0 * sol.terms.kinetic - sol.terms.attraction, o.rel_tol * sol.terms.attraction, sol.params.p);
    parts.push_back(leaf("3T_below_Aterm", k, o.abs_tol));
  }
  return combine("virial", std::move(parts));
}

CheckReport check_excess_bounds(const TFWSolution& sol, const std::optional<bounds::BoundResult>& bound,
                                const VerifyOptions& o) {
  const auto& prm = sol.params;
  const double Z = prm.Z;
  const double qtol = o.abs_tol + o.rel_tol * Z + o.charge_slack * Z;
  const double where = prm.p;
  std::vector<CheckReport> parts{convergence_gate(sol, o)};
  {
    // strict: Q < Z, so the allowance is zero and equality counts as a violation
    Worst w;
    w.add(sol.Q - Z, 0.0, where);
    auto c = leaf("Q_below_Z", w, 0.0, "Q - Z");
    c.pass = sol.Q < Z;
    parts.push_back(c);
  }
  if (prm.p >= 1.2) {
    Worst w;
    w.add(sol.N - model::nam_particle_bound(Z), 0.0, where);
    parts.push_back(leaf("N_below_nam", w, qtol, "N - 1.5211 Z"));
  }
  if (prm.p >= 4.0 / 3.0) {
    Worst w;
    w.add(-sol.Q, 0.0, where);
    parts.push_back(leaf("Q_nonnegative", w, qtol, "-Q"));
  }
  if (in_window(prm.p)) {
    if (!bound) {
      parts.push_back(skipped("Q_below_B", "no bound supplied"));
    } else {
      if (std::abs(bound->p - prm.p) > 1e-12)
        throw DomainError("check_excess_bounds: bound computed at a different p");
      const double B = bounds::restore_units(bound->B, prm.p, prm.bigA, prm.gamma);
      Worst w;
      w.add(sol.Q - B, 0.0, where);
      std::ostringstream d;
      d << "Q - B with B = " << B;
      parts.push_back(leaf("Q_below_B", w, qtol, d.str()));
    }
  }
  if (prm.p == 1.5) {
    const double crit = model::critical_excess_bound(prm.gamma, Z);
    Worst w;
    w.add(sol.Q - crit, 0.0, prm.gamma);
    std::ostringstream d;
    d << "Q - critical bound " << crit;
    parts.push_back(leaf("critical_bound", w, qtol, d.str()));
  }
  return combine("excess_bounds", std::move(parts));
}

namespace {

CheckReport coercivity(const RadialProfile& rho, double p, double gamma, double Z, const VerifyOptions& o) {
  const auto& g = rho.grid();
  const std::size_t n = g.size();
  const double r0 = g.r_min();
  std::vector<double> rp(n), att(n);
  for (std::size_t i = 0; i < n; ++i) {
    rp[i] = pos_pow(rho[i], p);
    att[i] = Z / g.r(i) * rho[i];
  }
  const double int_rp = radial::integrate_volume(RadialProfile(rho.grid_ptr(), rp)) +
                        4.0 * kPi / 3.0 * r0 * r0 * r0 * rp[0];
  const double int_att =
      radial::integrate_volume(RadialProfile(rho.grid_ptr(), att)) + 2.0 * kPi * Z * r0 * r0 * rho[0];
  const auto H = radial::hartree_potential(rho);
  std::vector<double> rep(n);
  for (std::size_t i = 0; i < n; ++i)
    rep[i] = rho[i] * H[i];
  const double D = 0.5 * radial::integrate_volume(RadialProfile(rho.grid_ptr(), rep));
  const double E = gamma / p * int_rp - int_att + D;
  const double norm = std::pow(int_rp, 1.0 / p);
  const double pd = p / (p - 1.0);
  const double lower = gamma / p * int_rp - 4.0 * kPi * Z / (3.0 - pd) * norm - 2.0 * Z * std::sqrt(D) + D;
  Worst w;
  w.add(lower - E, o.rel_tol * std::abs(E), p);
  std::ostringstream d;
  d << "E = " << E << ", lower bound = " << lower;
  return combine("coercivity", {leaf("energy_above_bound", w, o.abs_tol, d.str())});
}

} // namespace

CheckReport check_coercivity(const TFWSolution& sol, const VerifyOptions& o) {
  if (!(sol.params.p > 1.5))
    return skipped("coercivity", "requires p > 3/2");
  return coercivity(sol.rho(), sol.params.p, sol.params.gamma, sol.params.Z, o);
}

CheckReport check_coercivity(const TFSolution& sol, const VerifyOptions& o) {
  if (!(sol.params.p > 1.5))
    return skipped("coercivity", "requires p > 3/2");
  return coercivity(sol.rho, sol.params.p, 1.0, sol.params.Z, o);
}

CheckReport check_decay(const TFWSolution& sol, const VerifyOptions& o) {
  const auto& g = sol.psi.grid();
  const std::size_t n = g.size();
  double peak = 0.0;
  std::size_t imax = 0;
  for (std::size_t i = 0; i < n; ++i) {
    peak = std::max(peak, g.r(i) * sol.psi[i]);
    if (sol.psi[i] > sol.psi[imax])
      imax = i;
  }
  Worst tail, mono;
  for (std::size_t i = 0; i < n; ++i)
    if (g.r(i) >= g.r_max() / 10.0)
      tail.add(g.r(i) * sol.psi[i] / peak, 0.0, g.r(i));
  for (std::size_t i = imax; i + 1 < n; ++i)
    mono.add(sol.psi[i + 1] - sol.psi[i], o.rel_tol * sol.psi[i], g.r(i + 1));
  return combine("decay", {convergence_gate(sol, o),
                           leaf("r_psi_outer_decade", tail, 1e-6, "r psi / max(r psi) for r >= r_max/10"),
                           leaf("psi_nonincreasing", mono, o.abs_tol, "rise of psi beyond its maximum")});
}

// ----- suite -----

namespace {

using Runner = std::function<CheckReport(const Context&)>;

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> r{
      {"subharmonic_P", [](const Context& c) { return check_subharmonic_P(c.tfw, c.options); }},
      {"lemma_g1", [](const Context& c) { return check_lemma_g1(c.tfw, c.options); }},
      {"t1", [](const Context& c) { return check_t1(c.tfw, c.options.lambdas, c.options); }},
      {"z0", [](const Context& c) { return check_z0(c.tfw, c.options.radii, c.options); }},
      {"tf_sommerfeld",
       [](const Context& c) {
         if (!c.tf)
           return skipped("tf_sommerfeld", "no TF solution");
         return check_tf_sommerfeld(*c.tf, c.options.tf_radius, c.options);
       }},
      {"virial", [](const Context& c) { return check_virial(c.tfw, c.options); }},
      {"excess_bounds", [](const Context& c) { return check_excess_bounds(c.tfw, c.bound, c.options); }},
      {"coercivity",
       [](const Context& c) { return c.tf ? check_coercivity(*c.tf, c.options) : check_coercivity(c.tfw, c.options); }},
      {"decay", [](const Context& c) { return check_decay(c.tfw, c.options); }},
  };
  return r;
}

bool selected(const std::vector<std::string>& sel, const char* name) {
  return std::find(sel.begin(), sel.end(), name) != sel.end();
}

void json_number(nlohmann::ordered_json& j, const char* key, double v) {
  if (std::isfinite(v))
    j[key] = v;
  else if (std::isnan(v))
    j[key] = nullptr;
  else
    j[key] = v > 0 ? "inf" : "-inf";
}

nlohmann::ordered_json to_json(const CheckReport& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["pass"] = c.pass;
  json_number(j, "violation", c.violation);
  json_number(j, "location", c.location);
  json_number(j, "tolerance", c.tolerance);
  if (!c.detail.empty())
    j["detail"] = c.detail;
  if (!c.parts.empty()) {
    j["parts"] = nlohmann::ordered_json::array();
    for (const auto& p : c.parts)
      j["parts"].push_back(to_json(p));
  }
  return j;
}

void text_record(std::ostream& os, const CheckReport& c, int depth) {
  os << std::string(2 * depth, ' ') << (c.pass ? "PASS " : "FAIL ") << c.name << "  violation=" << c.violation
     << "  location=" << c.location << "  tolerance=" << c.tolerance;
  if (!c.detail.empty())
    os << "  (" << c.detail << ")";
  os << '\n';
  for (const auto& p : c.parts)
    text_record(os, p, depth + 1);
}

} // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, run] : registry())
      v.push_back(name);
    return v;
  }();
  return names;
}

std::vector<std::string> parse_selection(const std::string& spec) {
  if (spec.empty() || spec == "all")
    return check_names();
  std::vector<std::string> wanted;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty())
      continue;
    if (item == "all")
      return check_names();
    if (std::find(check_names().begin(), check_names().end(), item) == check_names().end())
      throw DomainError("unknown check: " + item);
    wanted.push_back(item);
  }
  std::vector<std::string> out;
  for (const auto& name : check_names())
    if (std::find(wanted.begin(), wanted.end(), name) != wanted.end())
      out.push_back(name);
  return out;
}

void prepare(Context& ctx, const std::vector<std::string>& sel) {
  const auto& prm = ctx.tfw.params;
  const bool window = in_window(prm.p);
  if (!ctx.tf && window && (selected(sel, "tf_sommerfeld") || selected(sel, "coercivity"))) {
    model::ModelParams tp = prm;
    tp.gamma = 1.0;
    tp.bigA = 1.0;
    ctx.tf = solvers::solve_tf(tp, solvers::default_grid(tp));
  }
  if (!ctx.bound && window && selected(sel, "excess_bounds"))
    ctx.bound = bounds::compute_B(prm.p);
}

std::vector<CheckReport> run_checks(const Context& ctx, const std::vector<std::string>& sel) {
  std::vector<std::future<CheckReport>> jobs;
  for (const auto& [name, run] : registry())
    if (selected(sel, name.c_str()))
      jobs.push_back(std::async(std::launch::async, [&ctx, r = run] { return r(ctx); }));
  std::vector<CheckReport> out;
  for (auto& j : jobs)
    out.push_back(j.get());
  return out;
}

bool all_pass(const std::vector<CheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& c) { return c.pass; });
}

std::string format_text(const std::vector<CheckReport>& reports) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "# Sommerfeld constants fixed by boundary matching at R\n";
  for (const auto& c : reports)
    text_record(os, c, 0);
  os << (all_pass(reports) ? "ALL PASS" : "FAILED") << '\n';
  return os.str();
}

std::string format_json(const std::vector<CheckReport>& reports) {
  nlohmann::ordered_json j;
  j["pass"] = all_pass(reports);
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : reports)
    j["checks"].push_back(to_json(c));
  return j.dump(2);
}

void write_report(const std::string& text_path, const std::string& json_path,
                  const std::vector<CheckReport>& reports) {
  if (!text_path.empty()) {
    std::ofstream os(text_path);
    if (!os)
      throw std::runtime_error("cannot write " + text_path);
    os << format_text(reports);
  }
  if (!json_path.empty()) {
    std::ofstream os(json_path);
    if (!os)
      throw std::runtime_error("cannot write " + json_path);
    os << format_json(reports) << '\n';
  }
}

} // namespace tfwlab::verify
