#include "slitcap/symmetric.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "slitcap/error.hpp"

namespace slitcap {

namespace {

constexpr double kBracketLo = 0.1;
constexpr double kBracketHi = 3.0;
constexpr int kBisections = 70;

Complex critical_point(const Lattice& L, double alpha) {
  const double m = L.omega2_im();
  const Complex e1 = L.eta1();
  const Complex w = L.wp(alpha) - L.wp_prime(alpha) / (2.0 * (alpha * e1 - L.zeta(alpha)));
  return inverse_wp(w, L, BranchRegion{0.0, 0.5, 0.0, 0.5 * m});
}

Complex parallel_critical_point(const Lattice& L) {
  return inverse_wp(-L.eta1(), L, BranchRegion{0.0, 0.5, 0.0, 0.5 * L.omega2_im()});
}

// Same sign test as the reference listing: keep the half whose far end changes sign.
double bisect(const std::function<double(double)>& g, const char* what) {
  const double glo = g(kBracketLo);
  const double ghi = g(kBracketHi);
  if (!(glo * ghi < 0.0)) {
    std::ostringstream os;
    os << what << ": target not enclosed, residual " << glo << " at m=" << kBracketLo << ", " << ghi
       << " at m=" << kBracketHi;
    throw Error(ErrorKind::BracketFailure, os.str());
  }
  double lo = kBracketLo, hi = kBracketHi, ghigh = ghi;
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < kBisections; ++i) {
    mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if (ghigh * gm > 0.0) {
      hi = mid;
      ghigh = gm;
    } else {
      lo = mid;
    }
    if (hi - lo < 1e-14 * mid) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

AccessoryState SymmetricSolution::to_state() const {
  AccessoryState s;
  s.x = x_init;
  s.m = m0;
  s.y0 = y0_init;
  s.a = a0;
  s.t = 0.0;
  return s;
}

double critical_abscissa(double m, double alpha) { return critical_point(Lattice(m), alpha).real(); }

double length_ratio(double m, double alpha) {
  const Lattice L(m);
  const Complex z2 = critical_point(L, alpha);
  const Complex r = L.sigma(z2 + alpha) / L.sigma(z2 - alpha);
  return std::abs(kI * std::exp(-4.0 * alpha * L.eta1() * z2) * r * r);
}

double solve_symmetric_module(double target_ratio, double alpha) {
  if (!(target_ratio >= 1.0)) throw Error(ErrorKind::InvalidArgument, "length ratio must be >= 1");
  return bisect([&](double m) { return length_ratio(m, alpha) - target_ratio; }, "symmetric module");
}

double parallel_critical_abscissa(double m) { return parallel_critical_point(Lattice(m)).real(); }

double parallel_length_ratio(double m) {
  const Lattice L(m);
  const Complex z2 = parallel_critical_point(L);
  return std::abs((2.0 / kPi) * (L.zeta(z2) - L.eta1() * z2).real());
}

double solve_parallel_module(double target_ratio) {
  if (!(target_ratio > 0.0)) throw Error(ErrorKind::InvalidArgument, "length/gap ratio must be positive");
  return bisect([&](double m) { return parallel_length_ratio(m) - target_ratio; }, "parallel module");
}

SymmetricSolution initial_state_generic(const NormalizedConfig& n) {
  if (n.case_tag != SlitCase::Generic || !(n.beta > 0.0 && n.beta < kPi))
    throw Error(ErrorKind::InvalidArgument, "initial_state_generic needs beta in (0, pi)");
  const double alpha = n.beta / (4.0 * kPi);
  SymmetricSolution s;
  s.m0 = solve_symmetric_module(n.l4 / n.l3, alpha);
  const Lattice L(s.m0);
  const double X0 = critical_abscissa(s.m0, alpha);
  s.critical_abscissa = X0;
  s.x_init = {alpha + X0, alpha - X0, alpha + X0, alpha - X0};
  s.y0_init = -0.5 * s.m0;
  s.a0 = 0.5 * std::log(n.l3 * n.l4) - 2.0 * alpha * alpha * L.eta1() + std::log(L.sigma(2.0 * alpha)) + kPi * kI;
  s.c0 = std::sqrt(n.l3 * n.l4);
  return s;
}

SymmetricSolution initial_state_parallel(const NormalizedConfig& n) {
  if (n.case_tag != SlitCase::Parallel) throw Error(ErrorKind::InvalidArgument, "initial_state_parallel needs parallel slits");
  const double b = n.half_gap;
  SymmetricSolution s;
  // 2 |A3A4| / |Im(A3 - A1)| with Im(A1 - A3) = 2b
  s.m0 = solve_parallel_module(n.fixed_length / b);
  const double X0 = parallel_critical_abscissa(s.m0);
  s.critical_abscissa = X0;
  s.x_init = {X0, -X0, X0, -X0};
  s.y0_init = -0.5 * s.m0;
  s.a0 = Complex{std::log(2.0 * b / (2.0 * kPi)), kPi};
  s.c0 = b / kPi;
  return s;
}

SymmetricSolution initial_state(const NormalizedConfig& n) {
  return n.case_tag == SlitCase::Generic ? initial_state_generic(n) : initial_state_parallel(n);
}

}  // namespace slitcap
