#pragma once

#include <array>
#include <vector>

#include "slitcap/elliptic.hpp"
#include "slitcap/geometry.hpp"
#include "slitcap/state.hpp"

namespace slitcap {

/// The map f(z) = C \int_0^z e^{gamma u} prod sigma(u - z_k) / (sigma^2(u - z0) sigma^2(u + z0)) du + C1
/// of the strip -m < Im z < 0 onto the slit exterior, in the normalized frame.
struct MapData {
  AccessoryState state;
  Complex c{0.0, 0.0};
  Complex c1{0.0, 0.0};
  Complex gamma{0.0, 0.0};
  double beta = 0.0;
  Lattice lattice{1.0};
  // f(base) = base_value pins the additive constant: base = x3 - im, base_value = A3
  Complex base{0.0, 0.0};
  Complex base_value{0.0, 0.0};
  RigidMotion frame;
  Renumbering renumbering;
};

/// C = -e^a e^{-gamma z0} sigma^2(2 z0) / prod sigma(z0 - z_k) on (1, 2mi).
Complex recover_scale(const AccessoryState& s, double beta);

/// Builds MapData for a state of the homotopy described by ncfg; f(x3 - im) = A3(t).
MapData make_map(const AccessoryState& s, const NormalizedConfig& ncfg);

Complex map_derivative(Complex z, const MapData& md);

/// base_value + integral of f' from base to z, rerouted around the poles +-z0 if needed.
Complex map_eval(Complex z, const MapData& md, Complex base, Complex base_value);
/// Same, from the pinned point of md.
Complex map_eval(Complex z, const MapData& md);

/// Integral of f' along the straight segment [a, b]; absolute tolerance tol.
Complex integrate_segment(const MapData& md, Complex a, Complex b, double tol);

struct BoundaryTrace {
  double max_line_deviation = 0.0;
  std::array<double, 4> endpoint_errors{};  // in the label order of the target config
  std::vector<Complex> upper;  // images of Im z = 0, plane coordinates
  std::vector<Complex> lower;  // images of Im z = -m
  double closure_error = 0.0;  // |f(z + 1) - f(z)| over both lines
};

/// Samples both boundary lines (n points each) and compares with target's carriers and endpoints.
BoundaryTrace boundary_trace(const MapData& md, const SlitConfig& target, int n = 256);

}  // namespace slitcap
