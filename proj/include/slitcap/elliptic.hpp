#pragma once

// Weierstrass sigma/zeta/wp on rectangular lattices generated by 1 and i*omega2_im.
//
// Periods here are full periods (not half-periods), and eta_k = 2 zeta(omega_k / 2).
// Everything is evaluated from the Jacobi theta_1 q-series after reducing the argument
// into the fundamental rectangle. Lattices with omega2_im < 1 are handled through the
// homogeneity relations with the rotated lattice (1, i / omega2_im), so the series always
// runs with nome q <= exp(-pi).

#include <complex>

namespace slitcap {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Closed axis-aligned rectangle used to select one branch of the inverse of wp.
struct BranchRegion {
  double re_lo = 0.0;
  double re_hi = 0.5;
  double im_lo = 0.0;
  double im_hi = 0.5;

  bool contains(Complex z, double slack = 0.0) const {
    return z.real() >= re_lo - slack && z.real() <= re_hi + slack && z.imag() >= im_lo - slack &&
           z.imag() <= im_hi + slack;
  }
};

/// Value, first, second and third derivative of theta_1 with respect to its argument.
struct ThetaJet {
  Complex value;
  Complex d1;
  Complex d2;
  Complex d3;
};

/// zeta, wp and wp' at one point; they share a single theta evaluation.
struct WeierstrassJet {
  Complex zeta;
  Complex wp;
  Complex wp_prime;
};

class Lattice {
 public:
  static constexpr double kMinPeriod = 1e-4;
  static constexpr double kMaxPeriod = 1e4;
  static constexpr double kPoleRadius = 1e-12;

  /// Lattice with periods 1 and i*omega2_im. Throws OutOfRange outside [1e-4, 1e4].
  explicit Lattice(double omega2_im);

  double omega2_im() const { return omega2_im_; }
  Complex omega2() const { return {0.0, omega2_im_}; }
  Complex tau() const { return omega2(); }
  /// exp(i pi tau); underflows to zero for very tall lattices.
  double nome() const;
  Complex eta1() const { return eta1_; }
  Complex eta2() const { return eta2_; }
  Complex g2() const { return g2_; }
  Complex g3() const { return g3_; }

  /// |omega2 eta1 - eta2 - 2 pi i|
  double legendre_defect() const;

  /// Distance from z to the nearest lattice point.
  double distance_to_lattice(Complex z) const;

  // Evaluation entry points; see the free functions below for the public spelling.
  Complex sigma(Complex z) const;
  Complex zeta(Complex z) const;
  Complex wp(Complex z) const;
  Complex wp_prime(Complex z) const;
  WeierstrassJet jet(Complex z) const;

 private:
  struct Reduced {
    Complex u;  // in the fundamental rectangle of the core lattice
    double n1;
    double n2;
  };

  Reduced reduce_core(Complex u) const;
  ThetaJet core_theta(Complex u, Complex* log_scale) const;
  WeierstrassJet core_jet(Complex u) const;
  Complex core_sigma(Complex u) const;
  void check_pole(Complex z, const char* what) const;

  double omega2_im_;
  // Core lattice (1, i*core_t_) with core_t_ >= 1, related by z_core = scale_ * z.
  double core_t_;
  double core_q_;
  Complex scale_;
  double core_eta1_;
  Complex core_eta2_;
  Complex core_theta1_prime0_;  // scaled by q^{-1/4}
  Complex eta1_;
  Complex eta2_;
  Complex g2_;
  Complex g3_;
};

Lattice lattice_from_periods(double omega2_im);

/// theta_1(z | tau) = 2 sum (-1)^n q^{(n+1/2)^2} sin((2n+1) z), q = exp(i pi tau).
/// Throws ConvergenceFailure when more than 200 terms would be needed.
Complex theta1(Complex z, Complex tau);
/// d/dz theta_1(z | tau).
Complex theta1_prime(Complex z, Complex tau);

Complex sigma(Complex z, const Lattice& lattice);
Complex zeta_w(Complex z, const Lattice& lattice);
Complex wp(Complex z, const Lattice& lattice);
Complex wp_prime(Complex z, const Lattice& lattice);

/// Root of wp(z) = w inside region, refined by Newton from a 64x64 seed grid.
/// Among several roots the one with smallest Im (then smallest Re) is returned.
Complex inverse_wp(Complex w, const Lattice& lattice, const BranchRegion& region);

/// Partial derivative of zeta(z; 1, omega2) with respect to omega2 (omega1 held at 1).
Complex dzeta_domega2(Complex z, const Lattice& lattice);

}  // namespace slitcap
