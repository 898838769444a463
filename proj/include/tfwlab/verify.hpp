#pragma once

#include "tfwlab/bounds.hpp"
#include "tfwlab/solvers.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tfwlab::verify {

using solvers::TFSolution;
using solvers::TFWSolution;

struct CheckReport {
  std::string name;
  bool pass = true;
  double violation = 0.0; // worst excess over the inequality, >= 0
  double location = 0.0;  // radius (or parameter) of the worst violation; NaN if none
  double tolerance = 0.0;
  std::string detail;
  std::vector<CheckReport> parts;
};

struct VerifyOptions {
  std::vector<double> lambdas{0.25, 0.5, 0.75};
  std::vector<double> radii{0.5, 1.0, 2.0};
  double tf_radius = 1.0;
  double euler_tol = 1e-6; // gate for statements about minimizers
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  // h^2 coefficient of the slack on Lap P >= 0; the three-point stencil
  // misses 1/r by 2 h^2 / r^3 on every refinement pair tried
  double h2_slack = 4.0;
  // slack on Q and N from quadrature, relative to Z
  double charge_slack = 1e-4;
};

// Each check returns a report whose pass flag is violation <= tolerance for
// every part; a check with parts carries the worst part as its headline.
CheckReport check_subharmonic_P(const TFWSolution& sol, const VerifyOptions& opts = {});
CheckReport check_lemma_g1(const TFWSolution& sol, const VerifyOptions& opts = {});
CheckReport check_t1(const TFWSolution& sol, const std::vector<double>& lambdas, const VerifyOptions& opts = {});
CheckReport check_z0(const TFWSolution& sol, const std::vector<double>& radii, const VerifyOptions& opts = {});
CheckReport check_tf_sommerfeld(const TFSolution& sol, double bigR, const VerifyOptions& opts = {});
CheckReport check_virial(const TFWSolution& sol, const VerifyOptions& opts = {});
CheckReport check_excess_bounds(const TFWSolution& sol, const std::optional<bounds::BoundResult>& bound,
                                const VerifyOptions& opts = {});
CheckReport check_coercivity(const TFWSolution& sol, const VerifyOptions& opts = {});
CheckReport check_coercivity(const TFSolution& sol, const VerifyOptions& opts = {});
CheckReport check_decay(const TFWSolution& sol, const VerifyOptions& opts = {});

// Everything the suite may need; tf and bound are filled by prepare() when selected checks need them.
struct Context {
  TFWSolution tfw;
  std::optional<TFSolution> tf;
  std::optional<bounds::BoundResult> bound;
  VerifyOptions options;
};

// Registered check names, in report order.
const std::vector<std::string>& check_names();
// "all" or a comma separated list of registered names; throws DomainError on unknown names.
std::vector<std::string> parse_selection(const std::string& spec);
// Solves the TF atom and computes B(p) when the selection needs them and they are absent.
void prepare(Context& ctx, const std::vector<std::string>& selection);
// Runs the selected checks concurrently; reports come back in registry order.
std::vector<CheckReport> run_checks(const Context& ctx, const std::vector<std::string>& selection);

bool all_pass(const std::vector<CheckReport>& reports);
std::string format_text(const std::vector<CheckReport>& reports);
std::string format_json(const std::vector<CheckReport>& reports);
void write_report(const std::string& text_path, const std::string& json_path, const std::vector<CheckReport>& reports);

} // namespace tfwlab::verify
