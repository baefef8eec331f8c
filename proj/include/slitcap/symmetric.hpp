#pragma once

#include <array>

#include "slitcap/elliptic.hpp"
#include "slitcap/geometry.hpp"
#include "slitcap/state.hpp"

namespace slitcap {

/// Initial data for the homotopy. Closed forms are evaluated on the lattice (1, im);
/// the stored values are already shifted to the (1, 2im) coordinates of AccessoryState.
struct SymmetricSolution {
  double m0 = 0.0;
  std::array<double, 4> x_init{};
  double y0_init = 0.0;
  Complex a0{0.0, 0.0};
  double c0 = 0.0;
  double critical_abscissa = 0.0;  // X0 before the shift

  AccessoryState to_state() const;
};

/// Generic symmetric case. Re z2 where wp(z2) = wp(alpha) - wp'(alpha) / (2 (alpha eta1 - zeta(alpha)))
/// on the lattice (1, im), z2 taken in [0, 1/2] x [0, m/2].
double critical_abscissa(double m, double alpha);
/// l4 / l3 of the symmetric configuration with module m.
double length_ratio(double m, double alpha);
/// Bisection of length_ratio(m) = target_ratio over m in [0.1, 3].
double solve_symmetric_module(double target_ratio, double alpha);

/// Parallel symmetric case: wp(z2) = -eta1 on (1, im).
double parallel_critical_abscissa(double m);
/// |A3A4| / half_gap of the symmetric parallel configuration with module m.
double parallel_length_ratio(double m);
double solve_parallel_module(double target_ratio);

SymmetricSolution initial_state_generic(const NormalizedConfig& ncfg);
SymmetricSolution initial_state_parallel(const NormalizedConfig& ncfg);
SymmetricSolution initial_state(const NormalizedConfig& ncfg);

}  // namespace slitcap
