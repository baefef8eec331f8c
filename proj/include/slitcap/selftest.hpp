#pragma once

#include <string>
#include <vector>

#include "slitcap/elliptic.hpp"

namespace slitcap {

struct CheckResult {
  std::string name;
  double worst = 0.0;  // largest observed error
  double limit = 0.0;
  bool pass = false;
};

/// wp from the lattice sum taken row by row: each row sums in closed form to pi^2 / sin^2,
/// and the constant is the same ordered sum over the nonzero periods.
Complex lattice_sum_wp(Complex z, double omega2_im);

/// Legendre relation, zeta' = -wp, sigma'/sigma = zeta, the cubic identity, the lattice-sum
/// oracle and the square-lattice specials.
std::vector<CheckResult> elliptic_property_suite(unsigned seed = 7);

/// d zeta / d omega2 against central differences in the period, 10 points on 3 lattices.
CheckResult period_derivative_check();

}  // namespace slitcap
