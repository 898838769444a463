#include "tfwlab/radial.hpp"

#include "tfwlab/errors.hpp"
#include "tfwlab/model.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tfwlab::radial {

using model::kPi;

GridPtr RadialGrid::make(double r_min, double r_max, std::size_t n) {
  if (!(r_min > 0.0) || !(r_max > r_min) || !std::isfinite(r_max))
    throw DomainError("make_grid: need 0 < r_min < r_max");
  if (n < 2)
    throw DomainError("make_grid: need at least 2 nodes");
  const double h = std::log(r_max / r_min) / static_cast<double>(n - 1);
  std::vector<double> nodes(n);
  for (std::size_t i = 0; i < n; ++i)
    nodes[i] = r_min * std::exp(h * static_cast<double>(i));
  nodes.front() = r_min;
  nodes.back() = r_max;
  return GridPtr(new RadialGrid(std::move(nodes), h));
}

GridPtr RadialGrid::from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 2)
    throw DomainError("grid needs at least 2 nodes");
  if (!(nodes.front() > 0.0))
    throw DomainError("grid nodes must be positive");
  const double h = std::log(nodes.back() / nodes.front()) / static_cast<double>(nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (!(nodes[i + 1] > nodes[i]))
      throw DomainError("grid nodes must be strictly increasing");
    if (std::abs(std::log(nodes[i + 1] / nodes[i]) - h) > 1e-9 * std::max(h, 1e-300))
      throw DomainError("grid nodes are not log-uniform");
  }
  return GridPtr(new RadialGrid(std::move(nodes), h));
}

double RadialGrid::ratio() const { return std::exp(h_); }

GridPtr RadialGrid::subsample(std::size_t stride) const {
  if (stride == 0 || (size() - 1) % stride != 0)
    throw DomainError("subsample: stride must divide n-1");
  std::vector<double> nodes;
  for (std::size_t i = 0; i < size(); i += stride)
    nodes.push_back(nodes_[i]);
  return GridPtr(new RadialGrid(std::move(nodes), h_ * static_cast<double>(stride)));
}

GridPtr make_grid(double r_min, double r_max, std::size_t n) { return RadialGrid::make(r_min, r_max, n); }

RadialProfile::RadialProfile(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_)
    throw DomainError("profile needs a grid");
  if (values_.size() != grid_->size())
    throw GridMismatch("profile length does not match grid");
  for (double v : values_)
    if (!std::isfinite(v))
      throw DomainError("profile values must be finite");
}

RadialProfile RadialProfile::zeros(GridPtr grid) {
  const std::size_t n = grid->size();
  return RadialProfile(std::move(grid), std::vector<double>(n, 0.0));
}

RadialProfile RadialProfile::sample(GridPtr grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = f(grid->r(i));
  return RadialProfile(std::move(grid), std::move(v));
}

RadialProfile RadialProfile::subsample(std::size_t stride) const {
  auto g = grid_->subsample(stride);
  std::vector<double> v;
  for (std::size_t i = 0; i < values_.size(); i += stride)
    v.push_back(values_[i]);
  return RadialProfile(std::move(g), std::move(v));
}

void require_same_grid(const RadialProfile& a, const RadialProfile& b) {
  if (a.grid_ptr() != b.grid_ptr() && !(a.grid() == b.grid()))
    throw GridMismatch("profiles live on different grids");
}

double simpson_uniform(const std::vector<double>& g, double h) {
  const std::size_t n = g.size();
  if (n < 2)
    return 0.0;
  if (n == 2)
    return 0.5 * h * (g[0] + g[1]);
  std::size_t end = n;
  double tail = 0.0;
  if ((n - 1) % 2 == 1) {
    // close with Simpson 3/8 over the last three panels
    end = n - 3;
    tail = 3.0 * h / 8.0 * (g[n - 4] + 3.0 * g[n - 3] + 3.0 * g[n - 2] + g[n - 1]);
  }
  double s = 0.0;
  for (std::size_t i = 0; i + 2 < end; i += 2)
    s += g[i] + 4.0 * g[i + 1] + g[i + 2];
  return h / 3.0 * s + tail;
}

double integrate(const RadialProfile& f) {
  const auto& g = f.grid();
  std::vector<double> w(f.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = f[i] * g.r(i);
  return simpson_uniform(w, g.log_step());
}

double integrate_volume(const RadialProfile& f) {
  const auto& g = f.grid();
  std::vector<double> w(f.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double r = g.r(i);
    w[i] = 4.0 * kPi * r * r * r * f[i];
  }
  return simpson_uniform(w, g.log_step());
}

double integrate_density(const RadialProfile& rho) {
  for (double v : rho.values())
    if (v < -1e-12)
      throw DomainError("integrate_density: density is negative");
  const double r0 = rho.grid().r_min();
  return integrate_volume(rho) + 4.0 * kPi / 3.0 * r0 * r0 * r0 * rho[0];
}

HartreeParts hartree_parts(const RadialProfile& rho) {
  const auto& g = rho.grid();
  const std::size_t n = g.size();
  const double h = g.log_step();
  HartreeParts parts{std::vector<double>(n), std::vector<double>(n, 0.0)};
  std::vector<double> gi(n), ko(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = g.r(i);
    ko[i] = 4.0 * kPi * r * r * rho[i];
    gi[i] = ko[i] * r;
  }
  parts.inner[0] = gi[0] / 3.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    parts.inner[i + 1] = parts.inner[i] + 0.5 * h * (gi[i] + gi[i + 1]);
  for (std::size_t i = n - 1; i-- > 0;)
    parts.outer[i] = parts.outer[i + 1] + 0.5 * h * (ko[i] + ko[i + 1]);
  return parts;
}

RadialProfile hartree_potential(const RadialProfile& rho) {
  const auto& g = rho.grid();
  const std::size_t n = g.size();
  const HartreeParts parts = hartree_parts(rho);
  const double total = parts.inner[n - 1];
  if (total > 0.0 && g.r_min() < 0.1 * g.r_max()) {
    std::size_t j = 0;
    while (j < n && g.r(j) < 0.1 * g.r_max())
      ++j;
    const double tail = total - parts.inner[j];
    if (tail > 1e-3 * total) {
      std::ostringstream msg;
      msg << "hartree_potential: " << tail / total * 100.0
          << "% of the mass lies in the outermost decade; enlarge r_max";
      throw GridTooSmall(msg.str());
    }
  }
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = parts.inner[i] / g.r(i) + parts.outer[i];
  return RadialProfile(rho.grid_ptr(), std::move(v));
}

Stencil laplacian_stencil(const RadialGrid& g, std::size_t i) {
  const double r = g.r(i);
  const double h1 = r - g.r(i - 1), h2 = g.r(i + 1) - r;
  const double den = h1 * h2 * (h1 + h2);
  return {(2.0 * h2 - 2.0 / r * h2 * h2) / den,
          (-2.0 * (h1 + h2) + 2.0 / r * (h2 * h2 - h1 * h1)) / den,
          (2.0 * h1 + 2.0 / r * h1 * h1) / den};
}

Laplacian laplacian_radial(const RadialProfile& f) {
  const auto& g = f.grid();
  const std::size_t n = g.size();
  std::vector<double> v(n, 0.0);
  std::vector<bool> valid(n, false);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    v[i] = apply_stencil(laplacian_stencil(g, i), f[i - 1], f[i], f[i + 1]);
    valid[i] = true;
  }
  return {RadialProfile(f.grid_ptr(), std::move(v)), std::move(valid)};
}

namespace {

// Derivative at x of the quadratic through (x0,f0), (x1,f1), (x2,f2).
double lagrange_slope(double x, double x0, double x1, double x2, double f0, double f1, double f2) {
  return f0 * ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2)) +
         f1 * ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2)) +
         f2 * ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
}

} // namespace

RadialProfile derivative(const RadialProfile& f) {
  const auto& g = f.grid();
  const std::size_t n = g.size();
  if (n < 3)
    throw DomainError("derivative: need at least 3 nodes");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = std::min(std::max<std::size_t>(i, 1), n - 2);
    d[i] = lagrange_slope(g.r(i), g.r(c - 1), g.r(c), g.r(c + 1), f[c - 1], f[c], f[c + 1]);
  }
  return RadialProfile(f.grid_ptr(), std::move(d));
}

RadialProfile p_function(const RadialProfile& psi, const RadialProfile& phi, double bigA) {
  require_same_grid(psi, phi);
  std::vector<double> v(psi.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::sqrt(4.0 * kPi * bigA * psi[i] * psi[i] + phi[i] * phi[i]);
  return RadialProfile(psi.grid_ptr(), std::move(v));
}

double parse_double(const std::string& text) {
  // strtod keeps subnormals that stod would reject
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin)
    throw DomainError("not a number: " + text);
  return v;
}

void write_profile_csv(std::ostream& os, const RadialProfile& f) {
  os << "r,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i)
    os << f.r(i) << ',' << f[i] << '\n';
}

void write_profile_csv(const std::string& path, const RadialProfile& f) {
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error("cannot write " + path);
  write_profile_csv(os, f);
}

RadialProfile read_profile_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("r,value", 0) != 0)
    throw DomainError("profile CSV must start with header r,value");
  std::vector<double> r, v;
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw DomainError("malformed profile CSV line: " + line);
    r.push_back(parse_double(line.substr(0, comma)));
    v.push_back(parse_double(line.substr(comma + 1)));
  }
  return RadialProfile(RadialGrid::from_nodes(std::move(r)), std::move(v));
}

RadialProfile read_profile_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is)
    throw std::runtime_error("cannot read " + path);
  return read_profile_csv(is);
}

} // namespace tfwlab::radial
