// tfwlab: solve, bound-curve, verify, critical.
//
// Exit status: 0 ok, 1 usage or out-of-window input, 2 numerical failure,
// 3 a verification check failed.

#include "tfwlab/bounds.hpp"
#include "tfwlab/errors.hpp"
#include "tfwlab/model.hpp"
#include "tfwlab/solvers.hpp"
#include "tfwlab/svg.hpp"
#include "tfwlab/verify.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

using namespace tfwlab;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kVerify = 3 };

struct Config {
  std::string model = "tfw";
  double p = 5.0 / 3.0;
  double Z = 1.0;
  double gamma = 1.0;
  double bigA = 1.0;
  std::optional<std::size_t> grid_n;
  std::optional<double> r_min;
  std::optional<double> r_max;
  std::string out;
  std::string in;
  std::string svg;
  int jobs = 0;
  std::string checks = "all";
  double p_min = 1.55;
  double p_max = 1.99;
  std::optional<int> steps;
  double gamma_min = 4.0;
  double gamma_max = 10.0;
};

int jobs_of(const Config& c) {
  if (c.jobs > 0)
    return c.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

model::ModelParams params_of(const Config& c) {
  model::ModelParams m;
  m.p = c.p;
  m.Z = c.Z;
  m.gamma = c.gamma;
  m.bigA = c.bigA;
  m.validate();
  return m;
}

radial::GridPtr grid_of(const Config& c, const model::ModelParams& m) {
  const auto def = solvers::default_grid(m, c.grid_n.value_or(4000));
  return radial::make_grid(c.r_min.value_or(def->r_min()), c.r_max.value_or(def->r_max()), def->size());
}

std::string with_suffix(const std::string& path, const std::string& ext) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + ext;
  return path.substr(0, dot) + ext;
}

void print_tfw(const solvers::TFWSolution& s) {
  std::printf("model     tfw  p=%.10g  Z=%g  gamma=%g  A=%g\n", s.params.p, s.params.Z, s.params.gamma,
              s.params.bigA);
  std::printf("N         %.12g\n", s.N);
  std::printf("Q         %.12g\n", s.Q);
  std::printf("T         %.12g\n", s.terms.kinetic);
  std::printf("F         %.12g\n", s.terms.tf);
  std::printf("Aterm     %.12g\n", s.terms.attraction);
  std::printf("D         %.12g\n", s.terms.repulsion);
  std::printf("E         %.12g\n", s.terms.total());
  std::printf("residual  %.3e  (%d iterations)\n", s.euler_residual, s.iterations);
}

svg::Plot profile_plot(const radial::RadialProfile& f, const std::string& title, const std::string& ylabel) {
  svg::Series s;
  for (std::size_t i = 0; i < f.size(); ++i) {
    s.x.push_back(std::log10(f.r(i)));
    s.y.push_back(f.r(i) * f[i]);
  }
  svg::Plot plot;
  plot.title = title;
  plot.x_label = "log10 r";
  plot.y_label = ylabel;
  plot.series.push_back(std::move(s));
  return plot;
}

int cmd_solve(const Config& c) {
  const auto m = params_of(c);
  const auto grid = grid_of(c, m);
  const std::string out = c.out.empty() ? "solution.csv" : c.out;
  if (c.model == "tf") {
    const auto s = solvers::solve_tf(m, grid);
    solvers::write_solution(out, s);
    std::printf("model     tf  p=%.10g  Z=%g\n", m.p, m.Z);
    std::printf("N         %.12g\n", s.N);
    std::printf("Q         %.12g\n", s.N - m.Z);
    std::printf("slope     %.12g  (%d segments)\n", s.slope, s.segments);
    if (!c.svg.empty())
      svg::write(c.svg, profile_plot(s.phi, "Thomas-Fermi potential", "r phi(r)"));
  } else {
    const auto s = solvers::solve_tfw(m, grid);
    solvers::write_solution(out, s);
    print_tfw(s);
    if (!c.svg.empty())
      svg::write(c.svg, profile_plot(s.P(), "r P(r)", "r P(r)"));
  }
  std::printf("wrote %s and %s\n", out.c_str(), solvers::sidecar_path(out).c_str());
  return kOk;
}

int cmd_bound_curve(const Config& c) {
  const int steps = c.steps.value_or(90);
  const auto ps = bounds::sweep(c.p_min, c.p_max, steps);
  const auto curve = bounds::bound_curve(ps, {}, jobs_of(c));
  const std::string out = c.out.empty() ? "bound_curve.csv" : c.out;
  bounds::write_curve_csv(out, curve);
  const auto best = std::min_element(curve.begin(), curve.end(),
                                     [](const auto& a, const auto& b) { return a.B < b.B; });
  std::printf("points    %d over p in [%g, %g]\n", steps, c.p_min, c.p_max);
  std::printf("minimum   p = %.6f  B = %.6f  (branch %s)\n", best->p, best->B,
              bounds::branch_name(best->branch).c_str());
  if (!c.svg.empty()) {
    svg::Plot plot;
    plot.title = "Upper bound B(p) on the excess charge";
    plot.x_label = "p";
    plot.y_label = "B(p)";
    svg::Series s;
    for (const auto& b : curve) {
      s.x.push_back(b.p);
      s.y.push_back(b.B);
    }
    plot.series.push_back(std::move(s));
    std::ostringstream label;
    label << std::fixed << std::setprecision(2) << "min B = " << best->B << " at p = " << std::setprecision(4)
          << best->p;
    plot.points.push_back({best->p, best->B, label.str()});
    svg::write(c.svg, plot);
  }
  std::printf("wrote %s\n", out.c_str());
  return kOk;
}

int cmd_verify(const Config& c) {
  const auto selection = verify::parse_selection(c.checks);
  verify::Context ctx{c.in.empty() ? solvers::solve_tfw(params_of(c), grid_of(c, params_of(c)))
                                   : solvers::read_tfw_solution(c.in),
                      {}, {}, {}};
  verify::prepare(ctx, selection);
  const auto reports = verify::run_checks(ctx, selection);
  const std::string out = c.out.empty() ? "verify_report.txt" : c.out;
  verify::write_report(out, with_suffix(out, ".json"), reports);
  std::cout << verify::format_text(reports);
  return verify::all_pass(reports) ? kOk : kVerify;
}

int cmd_critical(const Config& c) {
  if (c.p != 1.5)
    throw DomainError("critical: p is fixed at 3/2");
  if (!(c.gamma_min > 0.0 && c.gamma_min <= c.gamma_max))
    throw DomainError("critical: need 0 < gamma-min <= gamma-max");
  const int steps = c.steps.value_or(7);
  if (steps < 1)
    throw DomainError("critical: steps must be positive");
  std::vector<double> gammas(steps);
  for (int i = 0; i < steps; ++i)
    gammas[i] = steps == 1 ? c.gamma_min : c.gamma_min + (c.gamma_max - c.gamma_min) * i / (steps - 1);

  struct Row {
    double gamma, N, Q, bound;
  };
  std::vector<Row> rows(steps);
  const int workers = std::min(jobs_of(c), steps);
  std::atomic<int> next{0};
  std::vector<std::future<void>> pool;
  for (int w = 0; w < workers; ++w)
    pool.push_back(std::async(std::launch::async, [&] {
      for (int i = next++; i < steps; i = next++) {
        Config ci = c;
        ci.gamma = gammas[i];
        const auto m = params_of(ci);
        const auto s = solvers::solve_tfw(m, grid_of(ci, m));
        rows[i] = {gammas[i], s.N, s.Q, model::critical_excess_bound(gammas[i], m.Z)};
      }
    }));
  for (auto& f : pool)
    f.get();

  const std::string out = c.out.empty() ? "critical.csv" : c.out;
  std::ofstream os(out);
  if (!os)
    throw std::runtime_error("cannot write " + out);
  os << "gamma,N,Q,bound\n" << std::setprecision(17);
  std::printf("%-12s %-16s %-16s %s\n", "gamma", "N", "Q", "bound");
  for (const auto& r : rows) {
    os << r.gamma << ',' << r.N << ',' << r.Q << ',' << r.bound << '\n';
    std::printf("%-12.6g %-16.10g %-16.6e %.6g\n", r.gamma, r.N, r.Q, r.bound);
  }
  if (!c.svg.empty()) {
    svg::Plot plot;
    plot.title = "Excess charge at p = 3/2";
    plot.x_label = "gamma";
    plot.y_label = "Q";
    svg::Series q, b;
    q.label = "Q";
    b.label = "bound";
    b.color = "#888888";
    for (const auto& r : rows) {
      q.x.push_back(r.gamma);
      q.y.push_back(r.Q);
      b.x.push_back(r.gamma);
      b.y.push_back(r.bound);
    }
    plot.series = {b, q};
    plot.vlines.push_back({model::gamma_critical(), 0.0, "gamma_c = 4 sqrt(pi)"});
    svg::write(c.svg, plot);
  }
  std::printf("wrote %s\n", out.c_str());
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"Generalized Thomas-Fermi-von Weizsaecker atoms and excess-charge bounds", "tfwlab"};
  app.set_config("--config", "", "key=value file of option defaults");
  app.require_subcommand(1);

  app.add_option("--model", c.model, "tfw or tf (solve)")->check(CLI::IsMember({"tfw", "tf"}));
  app.add_option("--p", c.p, "TF exponent p");
  app.add_option("--Z", c.Z, "nuclear charge");
  app.add_option("--gamma", c.gamma, "TF coupling gamma");
  app.add_option("--A", c.bigA, "gradient coupling A");
  app.add_option("--grid-n", c.grid_n, "number of radial nodes");
  app.add_option("--r-min", c.r_min, "innermost radius");
  app.add_option("--r-max", c.r_max, "outermost radius");
  app.add_option("--out", c.out, "output path");
  app.add_option("--in", c.in, "solution CSV to verify");
  app.add_option("--svg", c.svg, "SVG plot path");
  app.add_option("--jobs", c.jobs, "worker threads (0 = all cores)");
  app.add_option("--checks", c.checks, "all, or a comma separated list of checks");
  app.add_option("--p-min", c.p_min, "sweep start");
  app.add_option("--p-max", c.p_max, "sweep end");
  app.add_option("--steps", c.steps, "sweep points");
  app.add_option("--gamma-min", c.gamma_min, "critical sweep start");
  app.add_option("--gamma-max", c.gamma_max, "critical sweep end");

  auto* solve = app.add_subcommand("solve", "solve a TFW or TF atom and write the profiles");
  auto* curve = app.add_subcommand("bound-curve", "compute B(p) over a window of p");
  auto* check = app.add_subcommand("verify", "run the inequality checks on a solution");
  auto* crit = app.add_subcommand("critical", "sweep gamma at p = 3/2");
  for (auto* sub : {solve, curve, check, crit})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*solve)
      return cmd_solve(c);
    if (*curve)
      return cmd_bound_curve(c);
    if (*check)
      return cmd_verify(c);
    return cmd_critical(c);
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const GridMismatch& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
}
