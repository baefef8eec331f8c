#include "slitcap/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace slitcap {

namespace {

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

template <class F>
Complex central5(F f, Complex z, double h) {
  return (-f(z + 2.0 * h) + 8.0 * f(z + h) - 8.0 * f(z - h) + f(z - 2.0 * h)) / (12.0 * h);
}

CheckResult finish(std::string name, double worst, double limit) { return {std::move(name), worst, limit, worst < limit}; }

// random points in the period cell, at least dmin from the lattice
struct PointSource {
  std::mt19937 rng;
  explicit PointSource(unsigned seed) : rng(seed) {}
  Complex next(const Lattice& L, double dmin) {
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    for (;;) {
      const Complex z(U(rng), L.omega2_im() * U(rng));
      if (L.distance_to_lattice(z) >= dmin) return z;
    }
  }
  double omega(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
};

}  // namespace

Complex lattice_sum_wp(Complex z, double omega2_im) {
  auto csc2 = [](Complex u) {
    const Complex s = std::sin(kPi * u);
    return kPi * kPi / (s * s);
  };
  Complex sum = csc2(z);
  double constant = kPi * kPi / 3.0;
  for (int m = 1; m < 100000; ++m) {
    const double t = kPi * m * omega2_im;
    if (t > 350.0) break;
    const Complex w(0.0, m * omega2_im);
    const Complex row = csc2(z + w) + csc2(z - w);
    // pi^2 / sin^2(i t) = -pi^2 / sinh^2 t
    const double c = 2.0 * kPi * kPi / (std::sinh(t) * std::sinh(t));
    sum += row;
    constant -= c;
    if (std::abs(row) + c < 1e-18 * std::abs(sum)) break;
  }
  return sum - constant;
}

std::vector<CheckResult> elliptic_property_suite(unsigned seed) {
  std::vector<CheckResult> out;
  PointSource src(seed);

  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double t = 0.2 * std::pow(25.0, k / 19.0);
    worst = std::max(worst, Lattice(t).legendre_defect());
  }
  out.push_back(finish("Legendre relation on 20 lattices, omega2 in [0.2, 5]", worst, 1e-12));

  const double h = 2e-4;
  worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Lattice L(src.omega(0.5, 2.0));
    const Complex z = src.next(L, 0.15);
    const Complex d = central5([&](Complex u) { return L.zeta(u); }, z, h);
    worst = std::max(worst, rel(d, -L.wp(z)));
  }
  out.push_back(finish("zeta' = -wp at 20 random points", worst, 1e-8));

  worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Lattice L(src.omega(0.5, 2.0));
    const Complex z = src.next(L, 0.15);
    const Complex d = central5([&](Complex u) { return L.sigma(u); }, z, h);
    worst = std::max(worst, rel(d / L.sigma(z), L.zeta(z)));
  }
  out.push_back(finish("sigma'/sigma = zeta at 20 random points", worst, 1e-8));

  worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Lattice L(src.omega(0.2, 5.0));
    const Complex z = src.next(L, 0.05 * std::min(1.0, L.omega2_im()));
    const Complex p = L.wp(z), dp = L.wp_prime(z);
    const Complex rhs = 4.0 * p * p * p - L.g2() * p - L.g3();
    worst = std::max(worst, std::abs(dp * dp - rhs) / (std::abs(dp * dp) + std::abs(4.0 * p * p * p)));
  }
  out.push_back(finish("(wp')^2 = 4 wp^3 - g2 wp - g3, relative", worst, 1e-9));

  worst = 0.0;
  for (double t : {0.3, 0.7, 1.0, 1.6, 3.5}) {
    const Lattice L(t);
    for (int k = 0; k < 5; ++k) {
      const Complex z = src.next(L, 0.2 * std::min(1.0, t));
      const Complex ref = lattice_sum_wp(z, t);
      worst = std::max(worst, std::abs(L.wp(z) - ref) / std::abs(ref));
    }
  }
  out.push_back(finish("wp against the lattice sum, 5 points on 5 lattices", worst, 1e-6));

  const Lattice sq(1.0);
  out.push_back(finish("square lattice g3 = 0", std::abs(sq.g3()), 1e-13));
  out.push_back(finish("square lattice eta1 = pi", std::abs(sq.eta1() - kPi), 1e-10));
  return out;
}

CheckResult period_derivative_check() {
  PointSource src(11);
  double worst = 0.0;
  const double h = 1e-3;
  for (double t : {0.6, 1.0, 2.2}) {
    const Lattice L(t);
    for (int k = 0; k < 10; ++k) {
      const Complex z = src.next(L, 0.15);
      auto zt = [&](double s) { return Lattice(s).zeta(z); };
      const Complex d = (-zt(t + 2 * h) + 8.0 * zt(t + h) - 8.0 * zt(t - h) + zt(t - 2 * h)) / (12 * h);
      // omega2 = i t, so d/dt = i d/domega2
      worst = std::max(worst, rel(d, kI * dzeta_domega2(z, L)));
    }
  }
  return finish("d zeta / d omega2 against differences in the period, 10 points on 3 lattices", worst, 1e-6);
}

}  // namespace slitcap
