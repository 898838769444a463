#include "tfwlab/bounds.hpp"
#include "tfwlab/errors.hpp"
#include "tfwlab/model.hpp"
#include "tfwlab/solvers.hpp"
#include "tfwlab/verify.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace tfwlab;

namespace {

py::array_t<double> array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

model::ModelParams make_params(double p, double Z, double gamma, double bigA) {
  model::ModelParams m;
  m.p = p;
  m.Z = Z;
  m.gamma = gamma;
  m.bigA = bigA;
  m.validate();
  return m;
}

radial::GridPtr make_grid(const model::ModelParams& m, std::size_t n, std::optional<double> r_min,
                          std::optional<double> r_max) {
  const auto def = solvers::default_grid(m, n);
  return radial::make_grid(r_min.value_or(def->r_min()), r_max.value_or(def->r_max()), n);
}

py::dict report_dict(const verify::CheckReport& c) {
  py::dict d;
  d["name"] = c.name;
  d["pass"] = c.pass;
  d["violation"] = c.violation;
  d["location"] = c.location;
  d["tolerance"] = c.tolerance;
  d["detail"] = c.detail;
  py::list parts;
  for (const auto& p : c.parts)
    parts.append(report_dict(p));
  d["parts"] = parts;
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Generalized TFW and TF atoms, excess-charge bounds and inequality checks";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  m.def("scaling_constants", [](double p, double A, double gamma) {
    const auto s = model::scaling_constants(p, A, gamma);
    return py::make_tuple(s.a_p, s.b_p, s.c_p);
  }, py::arg("p"), py::arg("A"), py::arg("gamma"));
  m.def("c_lambda", &model::c_lambda, py::arg("p"), py::arg("lam"));
  m.def("gamma_critical", &model::gamma_critical);
  m.def("critical_excess_bound", &model::critical_excess_bound, py::arg("gamma"), py::arg("Z") = 1.0);
  m.def("nam_particle_bound", &model::nam_particle_bound, py::arg("Z") = 1.0);
  m.def("psi_cap_nonpositive_phi", &model::psi_cap_nonpositive_phi, py::arg("p"));

  py::class_<solvers::TFWSolution>(m, "TFWSolution")
      .def_property_readonly("r", [](const solvers::TFWSolution& s) { return array(s.psi.grid().nodes()); })
      .def_property_readonly("psi", [](const solvers::TFWSolution& s) { return array(s.psi.values()); })
      .def_property_readonly("phi", [](const solvers::TFWSolution& s) { return array(s.phi.values()); })
      .def_property_readonly("rho", [](const solvers::TFWSolution& s) { return array(s.rho().values()); })
      .def_property_readonly("P", [](const solvers::TFWSolution& s) { return array(s.P().values()); })
      .def_readonly("N", &solvers::TFWSolution::N)
      .def_readonly("Q", &solvers::TFWSolution::Q)
      .def_readonly("euler_residual", &solvers::TFWSolution::euler_residual)
      .def_readonly("iterations", &solvers::TFWSolution::iterations)
      .def_property_readonly("energies", [](const solvers::TFWSolution& s) {
        py::dict d;
        d["T"] = s.terms.kinetic;
        d["F"] = s.terms.tf;
        d["Aterm"] = s.terms.attraction;
        d["D"] = s.terms.repulsion;
        d["E"] = s.terms.total();
        return d;
      })
      .def("save", [](const solvers::TFWSolution& s, const std::string& path) { solvers::write_solution(path, s); });

  py::class_<solvers::TFSolution>(m, "TFSolution")
      .def_property_readonly("r", [](const solvers::TFSolution& s) { return array(s.phi.grid().nodes()); })
      .def_property_readonly("phi", [](const solvers::TFSolution& s) { return array(s.phi.values()); })
      .def_property_readonly("rho", [](const solvers::TFSolution& s) { return array(s.rho.values()); })
      .def_readonly("N", &solvers::TFSolution::N)
      .def_readonly("slope", &solvers::TFSolution::slope)
      .def("save", [](const solvers::TFSolution& s, const std::string& path) { solvers::write_solution(path, s); });

  m.def("solve_tfw", [](double p, double Z, double gamma, double A, std::size_t n, std::optional<double> r_min,
                        std::optional<double> r_max) {
    const auto prm = make_params(p, Z, gamma, A);
    const auto grid = make_grid(prm, n, r_min, r_max);
    py::gil_scoped_release release;
    return solvers::solve_tfw(prm, grid);
  }, py::arg("p") = 5.0 / 3.0, py::arg("Z") = 1.0, py::arg("gamma") = 1.0, py::arg("A") = 1.0,
        py::arg("n") = 4000, py::arg("r_min") = py::none(), py::arg("r_max") = py::none());

  m.def("solve_tf", [](double p, double Z, std::size_t n, std::optional<double> r_min, std::optional<double> r_max) {
    const auto prm = make_params(p, Z, 1.0, 1.0);
    const auto grid = make_grid(prm, n, r_min, r_max);
    py::gil_scoped_release release;
    return solvers::solve_tf(prm, grid);
  }, py::arg("p") = 5.0 / 3.0, py::arg("Z") = 1.0, py::arg("n") = 4000, py::arg("r_min") = py::none(),
        py::arg("r_max") = py::none());

  m.def("load_tfw", &solvers::read_tfw_solution, py::arg("path"));

  m.def("compute_B", [](double p) {
    bounds::BoundResult b;
    {
      py::gil_scoped_release release;
      b = bounds::compute_B(p);
    }
    const auto& w = b.branch == bounds::Branch::F ? b.F : b.G;
    py::dict d;
    d["p"] = b.p;
    d["B"] = b.B;
    d["branch"] = bounds::branch_name(b.branch);
    d["F"] = b.F.value;
    d["G"] = b.G.value;
    d["lambda"] = w.lambda;
    d["R"] = w.R;
    d["r"] = w.r;
    return d;
  }, py::arg("p"));

  m.def("bound_curve", [](double p_min, double p_max, int steps, int jobs) {
    std::vector<bounds::BoundResult> curve;
    {
      py::gil_scoped_release release;
      curve = bounds::bound_curve(bounds::sweep(p_min, p_max, steps), {}, jobs);
    }
    std::vector<double> ps, bs;
    for (const auto& b : curve) {
      ps.push_back(b.p);
      bs.push_back(b.B);
    }
    return py::make_tuple(array(ps), array(bs));
  }, py::arg("p_min") = 1.55, py::arg("p_max") = 1.99, py::arg("steps") = 90, py::arg("jobs") = 1);

  m.def("verify", [](const solvers::TFWSolution& sol, const std::string& checks) {
    const auto sel = verify::parse_selection(checks);
    std::vector<verify::CheckReport> reports;
    {
      py::gil_scoped_release release;
      verify::Context ctx{sol, {}, {}, {}};
      verify::prepare(ctx, sel);
      reports = verify::run_checks(ctx, sel);
    }
    py::list out;
    for (const auto& r : reports)
      out.append(report_dict(r));
    return out;
  }, py::arg("solution"), py::arg("checks") = "all");

  m.def("check_names", &verify::check_names);
}
