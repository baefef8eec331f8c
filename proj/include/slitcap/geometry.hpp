#pragma once

#include <array>
#include <complex>
#include <string>

#include "slitcap/elliptic.hpp"

namespace slitcap {

/// Two rectilinear slits A1A2 and A3A4 in the plane.
struct SlitConfig {
  Complex a1, a2, a3, a4;

  std::array<Complex, 4> points() const { return {a1, a2, a3, a4}; }
  static SlitConfig from_points(const std::array<Complex, 4>& p) { return {p[0], p[1], p[2], p[3]}; }
  double diameter() const;
};

enum class SlitCase { Generic, Parallel };

std::string to_string(SlitCase c);

/// Rigid motion (optionally orientation reversing) from the normalized frame to the plane:
/// physical = origin + rotation * (reflect ? conj(w) : w), |rotation| = 1.
struct RigidMotion {
  Complex origin{0.0, 0.0};
  Complex rotation{1.0, 0.0};
  bool reflect = false;

  Complex to_physical(Complex w) const { return origin + rotation * (reflect ? std::conj(w) : w); }
  Complex to_normalized(Complex p) const {
    const Complex w = (p - origin) / rotation;
    return reflect ? std::conj(w) : w;
  }
};

/// How the user's endpoints were relabeled. Normalized endpoint k is input endpoint source[k].
struct Renumbering {
  std::array<int, 4> source{0, 1, 2, 3};
  bool swapped_slits = false;
  bool reflected = false;
};

/// Canonical form of a two-slit configuration together with the straight-line homotopy
/// from the symmetric configuration (t = 0) to the target (t = 1). Only A1, A2 move.
///
/// Generic: A5 sits at the origin, A1A2 lies on the ray arg w = beta/2 and A3A4 on
/// arg w = -beta/2, so target endpoints are l_k exp(+-i beta/2). l1 is signed and is
/// negative when A1A2 passes through A5.
/// Parallel: both slits are horizontal, A3A4 = [-len/2, len/2] - i*half_gap, and the
/// symmetric start is its mirror image across the real axis.
struct NormalizedConfig {
  SlitCase case_tag = SlitCase::Generic;
  Complex a5{0.0, 0.0};  // physical intersection of the carrier lines (Generic only)
  double beta = 0.0;
  double l1 = 0.0, l2 = 0.0, l3 = 0.0, l4 = 0.0;
  double half_gap = 0.0;    // Parallel only
  double fixed_length = 0.0;  // |A3A4|
  Complex v1{0.0, 0.0};
  Complex v2{0.0, 0.0};
  std::array<Complex, 4> start{};   // normalized endpoints at t = 0
  std::array<Complex, 4> target{};  // normalized endpoints at t = 1
  RigidMotion frame;
  Renumbering renumbering;

  /// Normalized endpoints at homotopy time t.
  std::array<Complex, 4> endpoints_at(double t) const;
  /// Target endpoints in the plane, in normalized label order.
  std::array<Complex, 4> physical_target() const;
};

/// Parallel iff the carrier lines are parallel. Throws DegenerateGeometry for degenerate,
/// collinear, touching or intersecting slits.
SlitCase classify(const SlitConfig& cfg);

NormalizedConfig normalize_generic(const SlitConfig& cfg);
NormalizedConfig normalize_parallel(const SlitConfig& cfg);
/// Dispatches on classify().
NormalizedConfig normalize(const SlitConfig& cfg);

/// Minimal distance between two closed segments.
double segment_distance(Complex p0, Complex p1, Complex q0, Complex q1);

}  // namespace slitcap
