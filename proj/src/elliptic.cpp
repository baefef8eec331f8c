#include "slitcap/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "slitcap/error.hpp"

namespace slitcap {

namespace {

constexpr int kMaxTerms = 200;
constexpr double kSeriesTol = 1e-17;

// Sums S1 = sum c_n (2n+1) and S3 = sum c_n (2n+1)^3 with c_n = (-1)^n q^{n^2+n};
// theta_1'(0) = 2 q^{1/4} S1 and theta_1'''(0) = -2 q^{1/4} S3.
std::array<double, 2> theta_origin_sums(double q) {
  double s1 = 0.0;
  double s3 = 0.0;
  double c = 1.0;
  for (int n = 0; n < kMaxTerms; ++n) {
    const double k = 2.0 * n + 1.0;
    s1 += c * k;
    s3 += c * k * k * k;
    if (std::abs(c) * k * k * k <= kSeriesTol * std::abs(s1)) return {s1, s3};
    c *= -std::pow(q, 2.0 * n + 2.0);
  }
  throw Error(ErrorKind::ConvergenceFailure, "theta_1 derivatives at the origin");
}

// theta_2^4 and theta_4^4 at nome q.
std::array<double, 2> theta_constants4(double q) {
  double s2 = 0.0;  // sum q^{n^2+n}, theta_2 = 2 q^{1/4} s2
  double s4 = 1.0;  // theta_4 = 1 + 2 sum (-1)^n q^{n^2}
  for (int n = 0; n < kMaxTerms; ++n) {
    const double a = std::pow(q, double(n) * n + n);
    s2 += a;
    if (a <= kSeriesTol * s2) break;
  }
  for (int n = 1; n < kMaxTerms; ++n) {
    const double a = std::pow(q, double(n) * n);
    s4 += 2.0 * ((n % 2) ? -a : a);
    if (a <= kSeriesTol * std::abs(s4)) break;
  }
  const double t2 = 16.0 * q * s2 * s2 * s2 * s2;
  const double t4 = s4 * s4 * s4 * s4;
  return {t2, t4};
}

// exp(w) - 1 without cancellation for small |w|.
Complex expm1(Complex w) {
  const double half_sin = std::sin(0.5 * w.imag());
  const double re = std::expm1(w.real()) * std::cos(w.imag()) - 2.0 * half_sin * half_sin;
  return {re, std::exp(w.real()) * std::sin(w.imag())};
}

std::array<Complex, 2> invariants_of_core(double q) {
  const auto [t2, t4] = theta_constants4(q);
  const double f = kPi * kPi / 3.0;
  const double e1 = f * (t2 + 2.0 * t4);
  const double e2 = f * (t2 - t4);
  const double e3 = -f * (2.0 * t2 + t4);
  return {Complex(2.0 * (e1 * e1 + e2 * e2 + e3 * e3)), Complex(4.0 * e1 * e2 * e3)};
}

}  // namespace

Lattice::Lattice(double omega2_im) : omega2_im_(omega2_im) {
  if (!(omega2_im >= kMinPeriod && omega2_im <= kMaxPeriod)) {
    std::ostringstream os;
    os << "omega2_im = " << omega2_im << " outside [" << kMinPeriod << ", " << kMaxPeriod << "]";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  if (omega2_im >= 1.0) {
    core_t_ = omega2_im;
    scale_ = 1.0;
  } else {
    core_t_ = 1.0 / omega2_im;
    scale_ = Complex(0.0, -1.0 / omega2_im);
  }
  core_q_ = std::exp(-kPi * core_t_);
  const auto [s1, s3] = theta_origin_sums(core_q_);
  core_eta1_ = kPi * kPi * s3 / (3.0 * s1);
  core_eta2_ = kI * core_t_ * core_eta1_ - 2.0 * kPi * kI;
  core_theta1_prime0_ = 2.0 * s1;

  // eta1 is real for rectangular lattices; eta2 follows from the Legendre relation.
  // For small periods 1/2 is minus half the core omega2; with the Legendre relation
  // this gives eta1 = 2 pi T - T^2 core_eta1, T = core_t_.
  eta1_ = omega2_im_ >= 1.0 ? Complex(core_eta1_) : Complex(2.0 * kPi * core_t_ - core_t_ * core_t_ * core_eta1_);
  eta2_ = kI * omega2_im_ * eta1_ - 2.0 * kPi * kI;

  // Invariants from theta constants. Near the square lattice the direct value is
  // averaged with the one computed on the rotated lattice (1, i/omega2_im), which makes
  // g3 exactly odd under omega2_im -> 1/omega2_im.
  const auto core = invariants_of_core(core_q_);
  const Complex s2 = scale_ * scale_;
  Complex g2 = s2 * s2 * core[0];
  Complex g3 = s2 * s2 * s2 * core[1];
  if (omega2_im_ > 0.5 && omega2_im_ < 2.0) {
    const auto dual = invariants_of_core(std::exp(-kPi / core_t_));
    const Complex dual_scale = omega2_im_ >= 1.0 ? Complex(0.0, -1.0 / omega2_im_) : Complex(1.0);
    const Complex d2 = dual_scale * dual_scale;
    g2 = 0.5 * (g2 + d2 * d2 * dual[0]);
    g3 = 0.5 * (g3 + d2 * d2 * d2 * dual[1]);
  }
  g2_ = Complex(g2.real(), 0.0);
  g3_ = Complex(g3.real(), 0.0);
}

double Lattice::nome() const { return std::exp(-kPi * omega2_im_); }

double Lattice::legendre_defect() const {
  return std::abs(omega2() * eta1_ - eta2_ - 2.0 * kPi * kI);
}

double Lattice::distance_to_lattice(Complex z) const {
  const double n2 = std::round(z.imag() / omega2_im_);
  const double n1 = std::round(z.real());
  return std::abs(z - Complex(n1, n2 * omega2_im_));
}

Lattice::Reduced Lattice::reduce_core(Complex u) const {
  const double n2 = std::round(u.imag() / core_t_);
  const double n1 = std::round(u.real());
  return {Complex(u.real() - n1, u.imag() - n2 * core_t_), n1, n2};
}

// Scaled theta jet at v = pi*u for a reduced core argument. Every component is divided
// by q^{1/4} exp(-i v sgn Im v); log_scale receives the exp part.
ThetaJet Lattice::core_theta(Complex u, Complex* log_scale) const {
  Complex v = kPi * u;
  const bool flip = v.imag() < 0.0;
  if (flip) v = -v;
  // p^{n+1} - m^n = m^n expm1(2ikv) and p^{n+1} + m^n = m^n (expm1(2ikv) + 2),
  // with p = exp(2iv), |p| <= 1, and m = 1/p, |m| <= 1/q.
  const Complex m = std::exp(-2.0 * kI * v);
  Complex mn = 1.0;  // m^n
  double c = 1.0;
  Complex s_minus = 0.0, s_plus = 0.0, s2_minus = 0.0, s3_plus = 0.0;
  int n = 0;
  for (; n < kMaxTerms; ++n) {
    const double k = 2.0 * n + 1.0;
    const Complex e = expm1(2.0 * kI * k * v);
    const Complex dm = c * mn * e;
    const Complex dp = c * mn * (e + 2.0);
    s_minus += dm;
    s_plus += k * dp;
    s2_minus += k * k * dm;
    s3_plus += k * k * k * dp;
    // |e| and |e + 2| are both at most 2
    const double bound = 2.0 * std::abs(c * mn) * k * k * k;
    if (bound <= kSeriesTol * std::max(std::abs(s_minus), std::abs(s_plus))) break;
    c *= -std::pow(core_q_, 2.0 * n + 2.0);
    mn *= m;
  }
  if (n == kMaxTerms) throw Error(ErrorKind::ConvergenceFailure, "theta_1 series");
  ThetaJet jet{-kI * s_minus, s_plus, kI * s2_minus, -s3_plus};
  *log_scale = -kI * v;
  if (flip) {
    jet.value = -jet.value;
    jet.d2 = -jet.d2;
  }
  return jet;
}

WeierstrassJet Lattice::core_jet(Complex u) const {
  const Reduced r = reduce_core(u);
  Complex log_scale;
  const ThetaJet t = core_theta(r.u, &log_scale);
  const Complex l1 = t.d1 / t.value;
  const Complex l2 = t.d2 / t.value;
  const Complex l3 = t.d3 / t.value;
  WeierstrassJet out;
  out.zeta = core_eta1_ * r.u + kPi * l1 + r.n1 * core_eta1_ + r.n2 * core_eta2_;
  out.wp = -core_eta1_ - kPi * kPi * (l2 - l1 * l1);
  out.wp_prime = -kPi * kPi * kPi * (l3 - 3.0 * l2 * l1 + 2.0 * l1 * l1 * l1);
  return out;
}

Complex Lattice::core_sigma(Complex u) const {
  const Reduced r = reduce_core(u);
  Complex log_scale;
  const ThetaJet t = core_theta(r.u, &log_scale);
  Complex log_factor = 0.5 * core_eta1_ * r.u * r.u + log_scale;
  double sign = 1.0;
  if (r.n1 != 0.0 || r.n2 != 0.0) {
    const Complex w(r.n1, r.n2 * core_t_);
    const Complex eta = r.n1 * core_eta1_ + r.n2 * core_eta2_;
    log_factor += eta * (r.u + 0.5 * w);
    const bool both_even = std::fmod(r.n1, 2.0) == 0.0 && std::fmod(r.n2, 2.0) == 0.0;
    if (!both_even) sign = -1.0;
  }
  return sign * std::exp(log_factor) * t.value / (kPi * core_theta1_prime0_);
}

void Lattice::check_pole(Complex z, const char* what) const {
  if (distance_to_lattice(z) < kPoleRadius) {
    std::ostringstream os;
    os << what << " at z = " << z << " lies within " << kPoleRadius << " of a lattice point";
    throw Error(ErrorKind::PoleProximity, os.str());
  }
}

Complex Lattice::sigma(Complex z) const { return core_sigma(scale_ * z) / scale_; }

Complex Lattice::zeta(Complex z) const {
  check_pole(z, "zeta");
  return scale_ * core_jet(scale_ * z).zeta;
}

Complex Lattice::wp(Complex z) const {
  check_pole(z, "wp");
  return scale_ * scale_ * core_jet(scale_ * z).wp;
}

Complex Lattice::wp_prime(Complex z) const {
  check_pole(z, "wp'");
  return scale_ * scale_ * scale_ * core_jet(scale_ * z).wp_prime;
}

WeierstrassJet Lattice::jet(Complex z) const {
  check_pole(z, "Weierstrass functions");
  WeierstrassJet j = core_jet(scale_ * z);
  const Complex s2 = scale_ * scale_;
  return {scale_ * j.zeta, s2 * j.wp, s2 * scale_ * j.wp_prime};
}

Lattice lattice_from_periods(double omega2_im) { return Lattice(omega2_im); }

namespace {

template <bool Derivative>
Complex theta1_series(Complex z, Complex tau) {
  if (!(tau.imag() > 0.0)) throw Error(ErrorKind::InvalidArgument, "theta1 requires Im(tau) > 0");
  const double grow = std::exp(std::abs(z.imag()));
  Complex sum = 0.0;
  double first_bound = 0.0;
  for (int n = 0; n < kMaxTerms; ++n) {
    const double k = 2.0 * n + 1.0;
    const double e = (n + 0.5) * (n + 0.5);
    const Complex qpow = std::exp(kI * kPi * tau * e);
    const Complex term = Derivative ? qpow * k * std::cos(k * z) : qpow * std::sin(k * z);
    sum += (n % 2 ? -2.0 : 2.0) * term;
    const double bound = 2.0 * std::abs(qpow) * std::pow(grow, k) * (Derivative ? k : 1.0);
    if (n == 0) first_bound = bound;
    if (bound <= kSeriesTol * std::abs(sum) || bound <= 1e-34 * first_bound) return sum;
  }
  throw Error(ErrorKind::ConvergenceFailure, "theta_1 q-series needs more than 200 terms");
}

}  // namespace

Complex theta1(Complex z, Complex tau) { return theta1_series<false>(z, tau); }
Complex theta1_prime(Complex z, Complex tau) { return theta1_series<true>(z, tau); }

Complex sigma(Complex z, const Lattice& lattice) { return lattice.sigma(z); }
Complex zeta_w(Complex z, const Lattice& lattice) { return lattice.zeta(z); }
Complex wp(Complex z, const Lattice& lattice) { return lattice.wp(z); }
Complex wp_prime(Complex z, const Lattice& lattice) { return lattice.wp_prime(z); }

Complex dzeta_domega2(Complex z, const Lattice& lattice) {
  const WeierstrassJet j = lattice.jet(z);
  const Complex eta1 = lattice.eta1();
  const Complex bracket =
      0.5 * j.wp_prime + (j.zeta - eta1 * z) * j.wp + eta1 * j.zeta - lattice.g2() / 12.0 * z;
  return -bracket / (2.0 * kPi * kI);
}

namespace {

struct Candidate {
  Complex z;
  double residual;
};

}  // namespace

Complex inverse_wp(Complex w, const Lattice& lattice, const BranchRegion& region) {
  constexpr int kGrid = 64;
  constexpr int kNewtonCap = 50;
  const double tol = 1e-11 * std::max(1.0, std::abs(w));
  const double dx = (region.re_hi - region.re_lo) / kGrid;
  const double dy = (region.im_hi - region.im_lo) / kGrid;
  if (!(dx > 0.0) || !(dy > 0.0)) throw Error(ErrorKind::InvalidArgument, "empty branch region");

  std::vector<double> res(kGrid * kGrid);
  auto at = [&](int i, int j) -> double& { return res[i * kGrid + j]; };
  auto node = [&](int i, int j) {
    return Complex(region.re_lo + (i + 0.5) * dx, region.im_lo + (j + 0.5) * dy);
  };
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const Complex z = node(i, j);
      at(i, j) = lattice.distance_to_lattice(z) < 1e-9
                     ? std::numeric_limits<double>::infinity()
                     : std::abs(lattice.wp(z) - w);
    }
  }

  std::vector<Candidate> seeds;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double r = at(i, j);
      if (!std::isfinite(r)) continue;
      bool local_min = true;
      for (int di = -1; di <= 1 && local_min; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          const int a = i + di, b = j + dj;
          if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= kGrid || b >= kGrid) continue;
          if (at(a, b) < r) {
            local_min = false;
            break;
          }
        }
      }
      if (local_min) seeds.push_back({node(i, j), r});
    }
  }
  std::sort(seeds.begin(), seeds.end(),
            [](const Candidate& a, const Candidate& b) { return a.residual < b.residual; });
  if (seeds.size() > 8) seeds.resize(8);

  const double om = lattice.omega2_im();
  const double slack = 1e-10 * std::max({1.0, om, region.re_hi - region.re_lo});
  double best_residual = std::numeric_limits<double>::infinity();
  std::vector<Candidate> roots;

  for (const Candidate& seed : seeds) {
    Complex z = seed.z;
    double r = seed.residual;
    bool converged = false;
    int polish = 0;
    for (int it = 0; it < kNewtonCap; ++it) {
      if (lattice.distance_to_lattice(z) < 1e-9) break;
      const WeierstrassJet j = lattice.jet(z);
      r = std::abs(j.wp - w);
      best_residual = std::min(best_residual, r);
      if (r <= tol) {
        converged = true;
        if (++polish > 2) break;
      }
      if (j.wp_prime == Complex(0.0)) break;
      const Complex step = (j.wp - w) / j.wp_prime;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      if (converged && std::abs(step) < 1e-16 * std::max(1.0, std::abs(z))) break;
      z -= step;
    }
    if (!converged) continue;

    // Map the root onto every equivalent point +-z + lattice that lands in the region.
    for (double sgn : {1.0, -1.0}) {
      const Complex s = sgn * z;
      const int n1lo = int(std::floor(region.re_lo - s.real())) - 1;
      const int n1hi = int(std::ceil(region.re_hi - s.real())) + 1;
      const int n2lo = int(std::floor((region.im_lo - s.imag()) / om)) - 1;
      const int n2hi = int(std::ceil((region.im_hi - s.imag()) / om)) + 1;
      for (int n1 = n1lo; n1 <= n1hi; ++n1) {
        for (int n2 = n2lo; n2 <= n2hi; ++n2) {
          Complex c = s + Complex(n1, n2 * om);
          if (!region.contains(c, slack)) continue;
          c = Complex(std::clamp(c.real(), region.re_lo, region.re_hi),
                      std::clamp(c.imag(), region.im_lo, region.im_hi));
          const double rc = std::abs(lattice.wp(c) - w);
          if (rc > tol) continue;
          const bool dup = std::any_of(roots.begin(), roots.end(), [&](const Candidate& o) {
            return std::abs(o.z - c) < 1e-8;
          });
          if (!dup) roots.push_back({c, rc});
        }
      }
    }
  }

  if (roots.empty()) {
    std::ostringstream os;
    os << "no root of wp(z) = " << w << " in [" << region.re_lo << ", " << region.re_hi << "] x ["
       << region.im_lo << ", " << region.im_hi << "]; best residual " << best_residual;
    throw Error(ErrorKind::NoRootInRegion, os.str());
  }
  const auto pick = std::min_element(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.z.imag() - b.z.imag()) > 1e-10) return a.z.imag() < b.z.imag();
    return a.z.real() < b.z.real();
  });
  return pick->z;
}

}  // namespace slitcap
