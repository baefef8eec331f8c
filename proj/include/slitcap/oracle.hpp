#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "slitcap/geometry.hpp"

namespace slitcap {

/// Truncation box half-size in multiples of the config diameter; resolution in cells per unit length
/// in the uniform core around the plates. Outside the core the spacing grows geometrically.
struct GridSpec {
  double half_width = 6.0;
  int resolution = 256;
};

enum class Exec { Serial, Parallel };

/// Node-based 5-point finite-volume Laplacian on a tensor grid with Neumann outer boundary.
/// Fixed nodes carry Dirichlet values; every other node is free.
class GridProblem {
 public:
  GridProblem(std::vector<double> x, std::vector<double> y, std::vector<std::uint8_t> fixed, std::vector<double> value);

  int nx() const { return int(x_.size()); }
  int ny() const { return int(y_.size()); }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  const std::vector<std::uint8_t>& fixed() const { return fixed_; }
  const std::vector<double>& value() const { return value_; }
  size_t free_count() const;

  /// out = A u on free nodes, 0 on fixed nodes; fixed entries of u are read as 0.
  void apply(const std::vector<double>& u, std::vector<double>& out, Exec ex) const;
  /// Sum over grid edges of k_e (u_a - u_b)^2.
  double energy(const std::vector<double>& u, Exec ex) const;

 private:
  friend class Multigrid;
  std::vector<double> x_, y_, wx_, wy_, dx_, dy_;
  std::vector<std::uint8_t> fixed_;
  std::vector<double> value_;
};

struct GridResult {
  double capacity = 0.0;
  int iterations = 0;
  double relative_residual = 0.0;
  int nx = 0, ny = 0;
  std::vector<double> u;
};

/// Graded axis: spacing h on [core_lo, core_hi], growing by `growth` out to [box_lo, box_hi].
std::vector<double> graded_axis(double core_lo, double core_hi, double box_lo, double box_hi, double h,
                                double growth = 1.1);

/// Nodes within half a core cell of plate 0 (resp. 1) are fixed to 0 (resp. 1).
GridProblem plate_problem(const std::function<double(Complex)>& dist0, const std::function<double(Complex)>& dist1,
                          Complex core_lo, Complex core_hi, Complex center, double box_half, int resolution);

/// Slit A1A2 at potential 1, A3A4 at 0.
GridProblem slit_problem(const SlitConfig& cfg, const GridSpec& gs);
/// Concentric circles of radii q (potential 0) and 1 (potential 1); the diameter is 2.
GridProblem annulus_problem(double q, const GridSpec& gs);

/// Multigrid-preconditioned CG to relative residual tol; capacity is the discrete Dirichlet energy.
GridResult grid_solve(const GridProblem& p, Exec ex = Exec::Parallel, double tol = 1e-10, int max_iter = 1000);

double grid_capacity(const SlitConfig& cfg, const GridSpec& gs);
double annulus_capacity(double q, const GridSpec& gs);

}  // namespace slitcap
