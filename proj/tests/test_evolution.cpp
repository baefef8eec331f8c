#include <cmath>

#include "doctest.h"
#include "slitcap/error.hpp"
#include "slitcap/evolution.hpp"
#include "slitcap/symmetric.hpp"

using namespace slitcap;

namespace {

const Complex I{0.0, 1.0};

SlitConfig example1(double a) { return {-I, -2.0 * I, a - 0.5, a + 0.5}; }

double solve_module(const SlitConfig& cfg, double rel = 1e-9, double abs = 1e-11) {
  const NormalizedConfig n = normalize(cfg);
  return integrate(initial_state(n).to_state(), n, rel, abs).final_state().m;
}

AccessoryState advance(const AccessoryState& s, const StateDerivative& d, double h) {
  AccessoryState r = s;
  for (int k = 0; k < 4; ++k) r.x[k] += h * d.dx[k];
  r.m += h * d.dm;
  r.y0 += h * d.dy0;
  r.a += h * d.da;
  return r;
}

}  // namespace

TEST_CASE("gamma_k vanishes for fixed endpoints") {
  const NormalizedConfig n = normalize(example1(3.0));
  const AccessoryState s = initial_state(n).to_state();
  CHECK(gamma_k(s, n, 3) == Complex(0.0, 0.0));
  CHECK(gamma_k(s, n, 4) == Complex(0.0, 0.0));
  CHECK(std::abs(gamma_k(s, n, 1)) > 0.0);
  NormalizedConfig still = n;
  still.v1 = 0.0;
  CHECK(gamma_k(s, still, 1) == Complex(0.0, 0.0));
}

TEST_CASE("colliding critical points are rejected") {
  const NormalizedConfig n = normalize(example1(3.0));
  AccessoryState s = initial_state(n).to_state();
  s.x[1] = s.x[0];
  CHECK_THROWS_AS(gamma_k(s, n, 1), Error);
  try {
    gamma_k(s, n, 1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PoleProximity);
  }
}

TEST_CASE("zero velocity") {
  const NormalizedConfig n = normalize(example1(1.5));
  const AccessoryState s = initial_state(n).to_state();
  const StateDerivative d = rhs(s, n);
  for (double v : d.dx) CHECK(v == 0.0);
  CHECK(d.dm == 0.0);
  CHECK(d.dy0 == 0.0);
  CHECK(d.da == Complex(0.0, 0.0));
  const Trajectory tr = integrate(s, n);
  const AccessoryState& f = tr.final_state();
  for (int k = 0; k < 4; ++k) CHECK(std::abs(f.x[k] - s.x[k]) < 1e-10);
  CHECK(std::abs(f.m - s.m) < 1e-10);
  CHECK(std::abs(f.y0 - s.y0) < 1e-10);
  CHECK(std::abs(f.a - s.a) < 1e-10);
  CHECK(f.t == 1.0);
}

TEST_CASE("rhs conserves the constraints") {
  for (double a : {0.0, 3.0, 7.0}) {
    const NormalizedConfig n = normalize(example1(a));
    const AccessoryState s = initial_state(n).to_state();
    const StateDerivative d = rhs(s, n);
    CHECK(std::abs(d.dx[0] + d.dx[1] + d.dx[2] + d.dx[3]) < 1e-9);

    // derivative of the residue identity along the flow, fourth-order central difference
    const double h = 1e-4;
    auto R = [&](double e) { return residue_identity(advance(s, d, e), n.beta); };
    const Complex dR = (-R(2 * h) + 8.0 * R(h) - 8.0 * R(-h) + R(-2 * h)) / (12 * h);
    CAPTURE(a);
    CHECK(std::abs(dR) < 1e-7);
  }
}

TEST_CASE("pole ordinate agrees with the critical-point equations") {
  // dz_l = dz0 - S_l; z1 stays real and Im z3 = m, so dy0 = Im S1 = dm + Im S3.
  for (double a : {0.0, 5.0}) {
    const NormalizedConfig n = normalize(example1(a));
    const AccessoryState s = initial_state(n).to_state();
    const StateDerivative d = rhs(s, n);
    const Lattice L(2.0 * s.m);
    const Complex z0 = s.z0(), eta1 = L.eta1(), gam = n.beta / kPi * eta1;
    const Complex g[2] = {gamma_k(s, n, 1), gamma_k(s, n, 2)};
    auto S = [&](int l) {
      const Complex zl = s.z(l);
      Complex r = 0.0;
      for (int j = 0; j < 2; ++j) {
        if (j == l) continue;
        r += g[j] * (L.zeta(zl - s.z(j)) - L.zeta(z0 - s.z(j)) - eta1 * (zl - z0));
      }
      if (l < 2) {
        Complex sum = 0.0;
        for (int j = 0; j < 4; ++j)
          if (j != l) sum += L.zeta(zl - s.z(j));
        r += g[l] * (sum + gam - eta1 * (zl - z0) - L.zeta(zl - z0) - 2.0 * L.zeta(zl + z0));
      }
      return r;
    };
    CAPTURE(a);
    CHECK(d.dy0 == doctest::Approx(S(0).imag()).epsilon(1e-9));
    CHECK(d.dy0 == doctest::Approx(d.dm + S(2).imag()).epsilon(1e-9));
    CHECK(d.dy0 == doctest::Approx(-d.dm + S(3).imag()).epsilon(1e-9));
  }
}

TEST_CASE("module growth rate against a finite difference of static solves") {
  // Fixed imaginary slit first, so the real slit [1, 2] is the one that moves. With
  // velocities scaled to one unit of slide, dm/dt at t = 0 is dm/da at a = 1.5.
  const double h = 1e-3;
  const NormalizedConfig n = normalize({1.0 + h, 2.0 + h, -I, -2.0 * I});
  REQUIRE(std::abs(n.l3 - 1.0) < 1e-12);
  NormalizedConfig unit = n;
  unit.v1 /= h;
  unit.v2 /= h;
  const AccessoryState s = initial_state(n).to_state();
  const double rate = rhs(s, unit).dm;
  // the static solves start from symmetric states of different ratios
  const double mp = solve_module(example1(1.5 + h), 1e-12, 1e-13);
  const double mm = solve_module(example1(1.5 - h), 1e-12, 1e-13);
  CHECK(rate == doctest::Approx((mp - mm) / (2 * h)).epsilon(1e-5));
}

TEST_CASE("Example 1 moduli") {
  const double ref[] = {0.56247, 0.62207, 0.72955, 0.82469, 0.90239, 0.96656, 1.02073, 1.06743};
  for (int a = 0; a < 8; ++a) {
    CAPTURE(a);
    const double m = solve_module(example1(a));
    CHECK(std::abs(m - ref[a]) < 1e-4);
  }
  CHECK(std::abs(1.0 / solve_module(example1(7.0)) - 0.93682) < 2e-4);
}

TEST_CASE("trajectory bookkeeping and first integrals") {
  const NormalizedConfig n = normalize(example1(7.0));
  const Trajectory tr = integrate(initial_state(n).to_state(), n);
  REQUIRE(tr.samples.size() >= 2);
  CHECK(tr.samples.front().t == 0.0);
  CHECK(tr.final_state().t == 1.0);
  for (size_t i = 1; i < tr.samples.size(); ++i) {
    CHECK(tr.samples[i].t > tr.samples[i - 1].t);
    CHECK(tr.samples[i].m > 0.0);
  }
  CHECK(tr.defect_log.size() == tr.samples.size());
  CHECK(tr.step_stats.size() == tr.samples.size() - 1);
  CHECK(tr.max_sum_defect() < 1e-7);
  CHECK(tr.max_residue_defect() < 1e-7);
  CHECK(tr.defect_warnings == 0);
}

TEST_CASE("reversibility") {
  // forward from a = 1.5 to a = 2, then back along the negated velocities
  const NormalizedConfig n = normalize(example1(2.0));
  const AccessoryState s0 = initial_state(n).to_state();
  const AccessoryState s1 = integrate(s0, n).final_state();
  NormalizedConfig back = n;
  back.v1 = -n.v1;
  back.v2 = -n.v2;
  AccessoryState start = s1;
  start.t = 0.0;
  const AccessoryState s2 = integrate(start, back).final_state();
  for (int k = 0; k < 4; ++k) CHECK(std::abs(s2.x[k] - s0.x[k]) < 1e-6);
  CHECK(std::abs(s2.m - s0.m) < 1e-6);
  CHECK(std::abs(s2.y0 - s0.y0) < 1e-6);
  CHECK(std::abs(s2.a - s0.a) < 1e-6);
}

TEST_CASE("tolerance convergence") {
  const SlitConfig cfg = example1(7.0);
  const double ref = solve_module(cfg, 1e-13, 1e-13);
  const double e6 = std::abs(solve_module(cfg, 1e-6, 1e-8) - ref);
  const double e8 = std::abs(solve_module(cfg, 1e-8, 1e-10) - ref);
  CHECK(e8 < e6);
  CHECK(e8 < 1e-7);
}

TEST_CASE("constraint_defects") {
  const NormalizedConfig n = normalize(example1(3.0));
  AccessoryState s = initial_state(n).to_state();
  const ConstraintDefects d0 = constraint_defects(s, n.beta);
  CHECK(d0.sum_defect < 1e-8);
  CHECK(d0.residue_defect < 1e-8);
  s.x[0] += 1e-3;
  CHECK(std::abs(constraint_defects(s, n.beta).sum_defect - 1e-3) < 1e-12);
}

TEST_CASE("integration errors") {
  const NormalizedConfig n = normalize(example1(7.0));
  const AccessoryState s = initial_state(n).to_state();
  CHECK_THROWS_AS(integrate(s, n, 1e-3, 1e-11), Error);

  IntegrationOptions o;
  o.max_defect = 1e-16;
  o.warn_defect = 1e-17;
  try {
    integrate(s, n, o);
    FAIL("expected a defect blowup");
  } catch (const IntegrationError& e) {
    CHECK(e.kind() == ErrorKind::DefectBlowup);
    CHECK(e.last_good().t == 0.0);
  }
}

TEST_CASE("module_rate") {
  const NormalizedConfig n = normalize(example1(3.0));
  const AccessoryState s = integrate(initial_state(n).to_state(), n).final_state();
  const StateDerivative d = rhs(s, n);
  CHECK(module_rate(s, n.beta, {n.v1, n.v2, 0.0, 0.0}) == doctest::Approx(d.dm).epsilon(1e-12));

  // slide A1A2 of a skew configuration along its own carrier
  const SlitConfig cfg{1.5, 2.5, -I, -1.0 - 2.0 * I};
  const NormalizedConfig c = normalize(cfg);
  REQUIRE(c.renumbering.source[0] < 2);
  const AccessoryState sc = integrate(initial_state(c).to_state(), c).final_state();
  const Complex v = c.frame.to_normalized(cfg.a1 + 1.0) - c.frame.to_normalized(cfg.a1);
  const double rate = module_rate(sc, c.beta, {v, v, 0.0, 0.0});
  const double h = 1e-3;
  const double mp = solve_module({1.5 + h, 2.5 + h, cfg.a3, cfg.a4}, 1e-12, 1e-13);
  const double mm = solve_module({1.5 - h, 2.5 - h, cfg.a3, cfg.a4}, 1e-12, 1e-13);
  CHECK(rate == doctest::Approx((mp - mm) / (2 * h)).epsilon(1e-5));
}
