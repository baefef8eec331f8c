#pragma once

#include <array>

#include "slitcap/elliptic.hpp"

namespace slitcap {

/// Accessory parameters at homotopy time t, on the lattice (1, 2mi).
/// z1 = x1, z2 = x2, z3 = x3 + im, z4 = x4 - im, z0 = i*y0 with y0 in (-m, 0).
struct AccessoryState {
  std::array<double, 4> x{};
  double m = 0.0;
  double y0 = 0.0;
  Complex a{0.0, 0.0};
  double t = 0.0;

  Complex z(int k) const {
    switch (k) {
      case 0: return {x[0], 0.0};
      case 1: return {x[1], 0.0};
      case 2: return {x[2], m};
      default: return {x[3], -m};
    }
  }
  std::array<Complex, 4> zs() const { return {z(0), z(1), z(2), z(3)}; }
  Complex z0() const { return {0.0, y0}; }
};

}  // namespace slitcap
