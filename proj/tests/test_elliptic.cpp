#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "slitcap/elliptic.hpp"
#include "slitcap/error.hpp"

using namespace slitcap;

namespace {

double rel(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

const std::vector<double> kTs{0.3, 0.5, 0.67578477, 1.0, 1.35, 2.0, 5.0};

const std::vector<Complex> sample_points(double t) {
  return {Complex(0.13, 0.07 * t), Complex(0.31, -0.21 * t), Complex(-0.27, 0.33 * t), Complex(0.45, 0.41 * t),
          Complex(0.05, -0.45 * t)};
}

}  // namespace

TEST_CASE("eta1 and invariants against Lambert series") {
  for (double t : kTs) {
    CAPTURE(t);
    const Lattice L(t);
    CHECK(std::abs(L.eta1() - oracle::eta1(t)) < 1e-12 * std::max(1.0, std::abs(oracle::eta1(t))));
    CHECK(std::abs(L.g2() - oracle::g2(t)) < 1e-11 * std::abs(oracle::g2(t)));
    CHECK(std::abs(L.g3() - oracle::g3(t)) < 1e-10 * std::max(1.0, std::abs(oracle::g2(t))));
    CHECK(L.legendre_defect() < 1e-12 * std::max(1.0, t));
  }
}

TEST_CASE("g2 against a direct lattice sum") {
  // square truncation converges like N^-2
  const double direct = oracle::lattice_g2(1.0, 400);
  CHECK(std::abs(Lattice(1.0).g2().real() - direct) < 1e-4 * direct);
  CHECK(std::abs(Lattice(2.0).g2().real() - oracle::lattice_g2(2.0, 400)) < 1e-4 * direct);
}

TEST_CASE("square lattice frozen values") {
  const Lattice L(1.0);
  CHECK(L.eta1().real() == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(L.g2().real() == doctest::Approx(189.07272012923).epsilon(1e-12));
  CHECK(std::abs(L.g3()) < 1e-12);
  // wp(1/2) = e1 = sqrt(g2)/2 for the lemniscatic case
  CHECK(std::abs(L.wp(0.5) - std::sqrt(L.g2()) / 2.0) < 1e-11);
  CHECK(std::abs(L.wp(Complex(0.5, 0.5))) < 1e-11);
}

TEST_CASE("wp and zeta against q-expansions") {
  for (double t : kTs) {
    for (Complex z : sample_points(t)) {
      CAPTURE(t);
      CAPTURE(z);
      CHECK(rel(zeta_w(z, Lattice(t)), oracle::zeta(z, t)) < 1e-11);
      CHECK(rel(wp(z, Lattice(t)), oracle::wp(z, t)) < 1e-10);
    }
  }
}

TEST_CASE("sigma against the product formula") {
  for (double t : kTs) {
    const Lattice L(t);
    for (Complex z : sample_points(t)) {
      CAPTURE(t);
      CAPTURE(z);
      const Complex ref = oracle::sigma(z, t);
      CHECK(std::abs(sigma(z, L) / ref - 1.0) < 1e-11);
    }
  }
}

TEST_CASE("sigma near the origin") {
  const Lattice L(1.0);
  for (double h : {1e-8, 1e-5, 1e-3}) {
    CHECK(std::abs(L.sigma(h) / h - 1.0) < 1e-14 + h * h);
  }
  CHECK(std::abs(L.sigma(0.0)) == 0.0);
  CHECK_THROWS_AS(L.zeta(0.0), Error);
}

TEST_CASE("quasi-periodicity") {
  for (double t : kTs) {
    const Lattice L(t);
    const Complex w1 = 1.0, w2 = L.omega2();
    for (Complex z : sample_points(t)) {
      CAPTURE(t);
      CAPTURE(z);
      CHECK(rel(L.zeta(z + w1), L.zeta(z) + L.eta1()) < 1e-11);
      CHECK(rel(L.zeta(z + w2), L.zeta(z) + L.eta2()) < 1e-11);
      CHECK(rel(L.wp(z + w2), L.wp(z)) < 1e-10);
      const Complex f1 = -std::exp(L.eta1() * (z + w1 / 2.0));
      const Complex f2 = -std::exp(L.eta2() * (z + w2 / 2.0));
      CHECK(std::abs(L.sigma(z + w1) / (f1 * L.sigma(z)) - 1.0) < 1e-11);
      CHECK(std::abs(L.sigma(z + w2) / (f2 * L.sigma(z)) - 1.0) < 1e-11);
    }
  }
}

TEST_CASE("differential identities") {
  for (double t : kTs) {
    const Lattice L(t);
    for (Complex z : sample_points(t)) {
      CAPTURE(t);
      CAPTURE(z);
      const WeierstrassJet j = L.jet(z);
      const Complex cubic = 4.0 * j.wp * j.wp * j.wp - L.g2() * j.wp - L.g3();
      CHECK(std::abs(j.wp_prime * j.wp_prime - cubic) < 1e-10 * std::max(1.0, std::abs(cubic)));
      // five-point derivative of zeta is -wp
      const double h = 2e-4;
      const Complex d = (-L.zeta(z + 2 * h) + 8.0 * L.zeta(z + h) - 8.0 * L.zeta(z - h) + L.zeta(z - 2 * h)) / (12 * h);
      CHECK(rel(d, -j.wp) < 1e-8);
      const Complex dp = (-L.wp(z + 2 * h) + 8.0 * L.wp(z + h) - 8.0 * L.wp(z - h) + L.wp(z - 2 * h)) / (12 * h);
      CHECK(rel(dp, j.wp_prime) < 1e-7);
    }
  }
}

TEST_CASE("parity") {
  const Lattice L(0.8);
  for (Complex z : sample_points(0.8)) {
    CHECK(std::abs(L.sigma(-z) + L.sigma(z)) < 1e-14 * std::abs(L.sigma(z)));
    CHECK(std::abs(L.zeta(-z) + L.zeta(z)) < 1e-12 * std::abs(L.zeta(z)));
    CHECK(std::abs(L.wp(-z) - L.wp(z)) < 1e-12 * std::abs(L.wp(z)));
  }
}

TEST_CASE("theta1 series") {
  const Complex tau(0.2, 0.9);
  for (Complex z : {Complex(0.3, 0.1), Complex(-1.2, 0.4), Complex(2.0, -0.3)}) {
    CHECK(std::abs(theta1(-z, tau) + theta1(z, tau)) < 1e-14 * std::abs(theta1(z, tau)));
    // theta1(z + pi) = -theta1(z)
    CHECK(std::abs(theta1(z + kPi, tau) + theta1(z, tau)) < 1e-12 * std::abs(theta1(z, tau)));
    const double h = 1e-4;
    const Complex d = (theta1(z + h, tau) - theta1(z - h, tau)) / (2 * h);
    CHECK(std::abs(d - theta1_prime(z, tau)) < 1e-7 * std::abs(d));
  }
  // Jacobi triple product at z = 1/2, tau = i
  const Complex q = std::exp(kI * kPi * Complex(0.0, 1.0));
  Complex prod = 2.0 * std::pow(q, 0.25) * std::sin(0.5);
  for (int n = 1; n < 60; ++n) {
    const Complex q2n = std::pow(q, 2.0 * n);
    prod *= (1.0 - q2n) * (1.0 - 2.0 * q2n * std::cos(1.0) + q2n * q2n);
  }
  CHECK(std::abs(theta1(0.5, Complex(0.0, 1.0)) - prod) < 1e-15);
  CHECK_THROWS_AS(theta1(0.1, Complex(0.3, -0.1)), Error);
}

TEST_CASE("lattice range") {
  CHECK_THROWS_AS(Lattice(5e-5), Error);
  CHECK_THROWS_AS(Lattice(2e4), Error);
  CHECK_NOTHROW(Lattice(1e-4));
  CHECK_NOTHROW(Lattice(1e4));
  // tall lattices degenerate to trigonometric limits
  const Lattice tall(60.0);
  CHECK(tall.eta1().real() == doctest::Approx(kPi * kPi / 3.0).epsilon(1e-14));
  CHECK(std::abs(tall.sigma(0.3) - std::exp(kPi * kPi / 6.0 * 0.09) * std::sin(0.3 * kPi) / kPi) < 1e-14);
}

TEST_CASE("small periods via homogeneity") {
  const double t = 0.004;
  const Lattice L(t);
  // homogeneity with lambda = -i/t
  const Lattice R(1.0 / t);
  const Complex lam(0.0, -1.0 / t);
  const Complex z(0.0003, 0.0011);
  CHECK(rel(L.wp(z), lam * lam * R.wp(lam * z)) < 1e-12);
  CHECK(rel(L.zeta(z), lam * R.zeta(lam * z)) < 1e-12);
  CHECK(std::abs(L.sigma(z) / (R.sigma(lam * z) / lam) - 1.0) < 1e-12);
  CHECK(rel(L.eta2(), t * kI * L.eta1() - 2.0 * kPi * kI) < 1e-12);
}

TEST_CASE("inverse_wp") {
  const Lattice L(1.0);
  const Complex z = inverse_wp(L.wp(0.25), L, BranchRegion{0.0, 0.5, 0.0, 0.5});
  CHECK(std::abs(z - 0.25) < 1e-10);

  for (double t : {0.4, 0.9, 2.5}) {
    const Lattice M(t);
    const BranchRegion r{0.0, 0.5, 0.0, 0.5 * t};
    for (Complex target : {Complex(0.11, 0.2 * t), Complex(0.4, 0.05 * t), Complex(0.27, 0.5 * t)}) {
      CAPTURE(t);
      CAPTURE(target);
      const Complex w = M.wp(target);
      const Complex root = inverse_wp(w, M, r);
      CHECK(r.contains(root, 1e-12));
      CHECK(rel(M.wp(root), w) < 1e-10);
      CHECK(std::abs(root - target) < 1e-8);
    }
  }

  // symmetric two-slit configuration: root sits on the upper edge
  const double m = 0.67578477, alpha = 0.125;
  const Lattice E(m);
  const Complex w = E.wp(alpha) - E.wp_prime(alpha) / (2.0 * (alpha * E.eta1() - E.zeta(alpha)));
  const Complex z2 = inverse_wp(w, E, BranchRegion{0.0, 0.5, 0.0, 0.5 * m});
  CHECK(z2.real() == doctest::Approx(0.22367571).epsilon(1e-6));
  CHECK(z2.imag() == doctest::Approx(m / 2).epsilon(1e-9));

  // root outside the region
  CHECK_THROWS_AS(inverse_wp(L.wp(Complex(0.25, 0.3)), L, BranchRegion{0.0, 0.5, 0.0, 0.1}), Error);
}

TEST_CASE("dzeta/domega2 against finite differences in the period") {
  for (double t : {0.5, 1.0, 1.7}) {
    for (Complex z : {Complex(0.21, 0.1), Complex(0.5, 0.0), Complex(-0.3, 0.4 * t)}) {
      CAPTURE(t);
      CAPTURE(z);
      const double h = 1e-3;
      auto zt = [&](double s) { return Lattice(s).zeta(z); };
      const Complex d = (-zt(t + 2 * h) + 8.0 * zt(t + h) - 8.0 * zt(t - h) + zt(t - 2 * h)) / (12 * h);
      // omega2 = i t, so d/dt = i d/domega2
      CHECK(rel(d, kI * dzeta_domega2(z, Lattice(t))) < 1e-8);
    }
  }
}
