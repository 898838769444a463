#include "tfwlab/solvers.hpp"

#include "tfwlab/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace tfwlab::solvers {

namespace {

using Columns = std::vector<std::vector<double>>;

void write_rows(const std::string& path, const RadialProfile& psi, const RadialProfile& phi,
                const RadialProfile& rho, const RadialProfile& P) {
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error("cannot write " + path);
  os << "r,psi,phi,rho,P\n" << std::setprecision(17);
  for (std::size_t i = 0; i < psi.size(); ++i)
    os << psi.r(i) << ',' << psi[i] << ',' << phi[i] << ',' << rho[i] << ',' << P[i] << '\n';
}

Columns read_rows(const std::string& path) {
  std::ifstream is(path);
  if (!is)
    throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(is, line) || line.rfind("r,psi,phi,rho,P", 0) != 0)
    throw DomainError(path + ": expected header r,psi,phi,rho,P");
  Columns cols(5);
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    std::stringstream ss(line);
    std::string cell;
    for (int k = 0; k < 5; ++k) {
      if (!std::getline(ss, cell, ','))
        throw DomainError(path + ": short row: " + line);
      cols[k].push_back(radial::parse_double(cell));
    }
  }
  return cols;
}

using Meta = std::map<std::string, std::string>;

void write_meta(const std::string& path, const std::vector<std::pair<std::string, double>>& kv,
                const std::string& model) {
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error("cannot write " + path);
  os << "model=" << model << '\n' << std::setprecision(17);
  for (const auto& [k, v] : kv)
    os << k << '=' << v << '\n';
}

Meta read_meta(const std::string& path) {
  std::ifstream is(path);
  if (!is)
    throw std::runtime_error("cannot read " + path);
  Meta m;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (line.empty() || line[0] == '#' || eq == std::string::npos)
      continue;
    m[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

double meta_number(const Meta& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end())
    throw DomainError("sidecar lacks key " + key);
  return radial::parse_double(it->second);
}

ModelParams meta_params(const Meta& m) {
  ModelParams prm;
  prm.p = meta_number(m, "p");
  prm.gamma = meta_number(m, "gamma");
  prm.bigA = meta_number(m, "A");
  prm.Z = meta_number(m, "Z");
  prm.K = m.count("K") ? static_cast<int>(meta_number(m, "K")) : 1;
  prm.validate();
  return prm;
}

} // namespace

std::string sidecar_path(const std::string& csv_path) { return csv_path + ".meta"; }

void write_solution(const std::string& csv_path, const TFWSolution& s) {
  write_rows(csv_path, s.psi, s.phi, s.rho(), s.P());
  write_meta(sidecar_path(csv_path),
             {{"p", s.params.p},
              {"gamma", s.params.gamma},
              {"A", s.params.bigA},
              {"Z", s.params.Z},
              {"K", s.params.K},
              {"N", s.N},
              {"Q", s.Q},
              {"T", s.terms.kinetic},
              {"F", s.terms.tf},
              {"Aterm", s.terms.attraction},
              {"D", s.terms.repulsion},
              {"euler_residual", s.euler_residual},
              {"iterations", s.iterations},
              {"scf_update", s.scf_update}},
             "tfw");
}

void write_solution(const std::string& csv_path, const TFSolution& s) {
  std::vector<double> psi(s.rho.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    psi[i] = std::sqrt(s.rho[i]);
  const RadialProfile psi_p(s.rho.grid_ptr(), std::move(psi));
  write_rows(csv_path, psi_p, s.phi, s.rho, radial::p_function(psi_p, s.phi));
  write_meta(sidecar_path(csv_path),
             {{"p", s.params.p},
              {"gamma", s.params.gamma},
              {"A", s.params.bigA},
              {"Z", s.params.Z},
              {"K", s.params.K},
              {"N", s.N},
              {"Q", s.N - s.params.Z},
              {"slope", s.slope},
              {"segments", s.segments},
              {"bisections", s.bisections}},
             "tf");
}

TFWSolution read_tfw_solution(const std::string& csv_path) {
  const Meta m = read_meta(sidecar_path(csv_path));
  if (m.count("model") && m.at("model") != "tfw")
    throw DomainError(csv_path + " does not hold a TFW solution");
  const ModelParams prm = meta_params(m);
  auto cols = read_rows(csv_path);
  auto grid = radial::RadialGrid::from_nodes(std::move(cols[0]));
  return make_tfw_solution(prm, RadialProfile(grid, std::move(cols[1])), RadialProfile(grid, std::move(cols[2])),
                           static_cast<int>(meta_number(m, "iterations")),
                           m.count("scf_update") ? meta_number(m, "scf_update") : 0.0);
}

TFSolution read_tf_solution(const std::string& csv_path) {
  const Meta m = read_meta(sidecar_path(csv_path));
  if (!m.count("model") || m.at("model") != "tf")
    throw DomainError(csv_path + " does not hold a TF solution");
  const ModelParams prm = meta_params(m);
  auto cols = read_rows(csv_path);
  auto grid = radial::RadialGrid::from_nodes(std::move(cols[0]));
  TFSolution s{prm, RadialProfile(grid, std::move(cols[2])), RadialProfile(grid, std::move(cols[3]))};
  s.N = radial::integrate_density(s.rho);
  s.slope = m.count("slope") ? meta_number(m, "slope") : 0.0;
  s.segments = m.count("segments") ? static_cast<int>(meta_number(m, "segments")) : 0;
  s.bisections = m.count("bisections") ? static_cast<int>(meta_number(m, "bisections")) : 0;
  return s;
}

} // namespace tfwlab::solvers
