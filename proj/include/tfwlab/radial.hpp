#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace tfwlab::radial {

// Log-uniform radial nodes r_i = r_min * q^i, i = 0..n-1.
class RadialGrid {
public:
  static std::shared_ptr<const RadialGrid> make(double r_min, double r_max, std::size_t n);
  // Accepts nodes that are positive, increasing and log-uniform to 1e-9 relative.
  static std::shared_ptr<const RadialGrid> from_nodes(std::vector<double> nodes);

  std::size_t size() const { return nodes_.size(); }
  double r(std::size_t i) const { return nodes_[i]; }
  const std::vector<double>& nodes() const { return nodes_; }
  double r_min() const { return nodes_.front(); }
  double r_max() const { return nodes_.back(); }
  double log_step() const { return h_; }
  double ratio() const;

  // Every stride-th node; (n-1) must be divisible by stride.
  std::shared_ptr<const RadialGrid> subsample(std::size_t stride) const;

  bool operator==(const RadialGrid& other) const { return nodes_ == other.nodes_; }

private:
  RadialGrid(std::vector<double> nodes, double h) : nodes_(std::move(nodes)), h_(h) {}
  std::vector<double> nodes_;
  double h_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(double r_min, double r_max, std::size_t n);

class RadialProfile {
public:
  RadialProfile(GridPtr grid, std::vector<double> values);
  static RadialProfile zeros(GridPtr grid);
  static RadialProfile sample(GridPtr grid, const std::function<double(double)>& f);

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double r(std::size_t i) const { return grid_->r(i); }

  RadialProfile subsample(std::size_t stride) const;

private:
  GridPtr grid_;
  std::vector<double> values_;
};

// Throws GridMismatch unless both profiles live on identical nodes.
void require_same_grid(const RadialProfile& a, const RadialProfile& b);

// Composite Simpson rule on uniformly spaced samples (3/8 rule closes an odd panel).
double simpson_uniform(const std::vector<double>& g, double h);

// int f dr over [r_min, r_max].
double integrate(const RadialProfile& f);
// int 4 pi r^2 f dr over [r_min, r_max].
double integrate_volume(const RadialProfile& f);
// Particle number int 4 pi r^2 rho dr, including the ball r < r_min at rho(r_min).
double integrate_density(const RadialProfile& rho);

// Cumulative pieces of the Hartree potential, trapezoid rule in t = ln r.
struct HartreeParts {
  std::vector<double> inner; // int_0^r 4 pi s^2 rho ds
  std::vector<double> outer; // int_r^rmax 4 pi s rho ds
};
HartreeParts hartree_parts(const RadialProfile& rho);

// (rho * 1/|x|)(r); throws GridTooSmall when more than 0.1% of the mass lies
// in the outermost decade of the grid.
RadialProfile hartree_potential(const RadialProfile& rho);

// Three-point f'' + (2/r) f' on the log grid.
struct Laplacian {
  RadialProfile values; // zero at invalid nodes
  std::vector<bool> valid;
};
Laplacian laplacian_radial(const RadialProfile& f);

// Stencil weights of laplacian_radial at interior node i: f_{i-1}, f_i, f_{i+1}.
struct Stencil {
  double lower, diag, upper;
};
Stencil laplacian_stencil(const RadialGrid& g, std::size_t i);

// The weights sum to zero, so the stencil acts on differences to limit cancellation.
inline double apply_stencil(const Stencil& s, double fm, double f0, double fp) {
  return s.lower * (fm - f0) + s.upper * (fp - f0);
}

// Second-order f' (one-sided at the ends).
RadialProfile derivative(const RadialProfile& f);

// P = sqrt(4 pi A psi^2 + phi^2); A is the gradient coupling.
RadialProfile p_function(const RadialProfile& psi, const RadialProfile& phi, double bigA = 1.0);

// strtod-based parse that accepts subnormal values.
double parse_double(const std::string& text);

void write_profile_csv(std::ostream& os, const RadialProfile& f);
void write_profile_csv(const std::string& path, const RadialProfile& f);
RadialProfile read_profile_csv(std::istream& is);
RadialProfile read_profile_csv(const std::string& path);

} // namespace tfwlab::radial
