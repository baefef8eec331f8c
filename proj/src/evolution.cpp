#include "slitcap/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace slitcap {

namespace {

constexpr double kCollision = 1e-10;
constexpr double kPinch = 1e-10;

// Everything rhs needs at one state, evaluated once.
struct Frame {
  Lattice L;
  std::array<Complex, 4> z;
  Complex z0;
  Complex eta1;
  Complex gamma;  // (beta / pi) eta1

  Frame(const AccessoryState& s, double beta)
      : L(2.0 * s.m), z(s.zs()), z0(s.z0()), eta1(L.eta1()), gamma(beta / kPi * eta1) {}

  Complex sig(Complex u, const char* what) const {
    if (L.distance_to_lattice(u) < kCollision) {
      std::ostringstream os;
      os << what << ": sigma argument " << u << " is within " << kCollision << " of a lattice point";
      throw Error(ErrorKind::PoleProximity, os.str());
    }
    return L.sigma(u);
  }
};

Complex velocity(const NormalizedConfig& n, int k) {
  if (k == 0) return n.v1;
  if (k == 1) return n.v2;
  return {0.0, 0.0};
}

Complex gamma_at(const Frame& f, const AccessoryState& s, Complex adot, int k) {
  if (adot == Complex(0.0, 0.0)) return {0.0, 0.0};
  const Complex z0 = f.z0;
  const Complex zk = f.z[k];
  Complex p0 = 1.0;
  for (int j = 0; j < 4; ++j) p0 *= f.sig(z0 - f.z[j], "gamma_k");
  const Complex s2 = f.sig(2.0 * z0, "gamma_k");
  Complex den = 1.0;
  for (int j = 0; j < 4; ++j)
    if (j != k) den *= f.sig(zk - f.z[j], "gamma_k");
  const Complex sm = f.sig(zk - z0, "gamma_k");
  const Complex sp = f.sig(zk + z0, "gamma_k");
  return -adot * p0 / (s2 * s2) * std::exp(-(s.a + f.gamma * (zk - z0))) * sm * sm * sp * sp / den;
}

}  // namespace

double Trajectory::max_sum_defect() const {
  double r = 0.0;
  for (const auto& d : defect_log) r = std::max(r, d.defects.sum_defect);
  return r;
}

double Trajectory::max_residue_defect() const {
  double r = 0.0;
  for (const auto& d : defect_log) r = std::max(r, d.defects.residue_defect);
  return r;
}

Complex gamma_k(const AccessoryState& s, const NormalizedConfig& ncfg, int k) {
  if (k < 1 || k > 4) throw Error(ErrorKind::InvalidArgument, "gamma_k index out of range");
  const Frame f(s, ncfg.beta);
  return gamma_at(f, s, velocity(ncfg, k - 1), k - 1);
}

double module_rate(const AccessoryState& s, double beta, const std::array<Complex, 4>& velocities) {
  const Frame f(s, beta);
  Complex g = 0.0;
  for (int k = 0; k < 4; ++k) g += gamma_at(f, s, velocities[k], k);
  return kPi * g.real();
}

StateDerivative rhs(const AccessoryState& s, const NormalizedConfig& ncfg) {
  StateDerivative d;
  std::array<Complex, 4> g{};
  bool moving = false;
  for (int k = 0; k < 4; ++k) moving = moving || velocity(ncfg, k) != Complex(0.0, 0.0);
  if (!moving) return d;

  const Frame f(s, ncfg.beta);
  const Complex z0 = f.z0;
  for (int k = 0; k < 4; ++k) g[k] = gamma_at(f, s, velocity(ncfg, k), k);

  auto zeta = [&](Complex u) { return f.L.zeta(u); };

  // zeta(z0 - z_j) only for moving j
  std::array<Complex, 4> zeta0{};
  for (int j = 0; j < 4; ++j)
    if (g[j] != Complex(0.0, 0.0)) zeta0[j] = zeta(z0 - f.z[j]);

  for (int l = 0; l < 4; ++l) {
    const Complex zl = f.z[l];
    Complex S = 0.0;
    for (int j = 0; j < 4; ++j) {
      if (j == l || g[j] == Complex(0.0, 0.0)) continue;
      S += g[j] * (zeta(zl - f.z[j]) - zeta0[j] - f.eta1 * (zl - z0));
    }
    if (g[l] != Complex(0.0, 0.0)) {
      Complex sum = 0.0;
      for (int j = 0; j < 4; ++j)
        if (j != l) sum += zeta(zl - f.z[j]);
      S += g[l] * (sum + f.gamma - f.eta1 * (zl - z0) - zeta(zl - z0) - 2.0 * zeta(zl + z0));
    }
    d.dx[l] = -S.real();
  }

  Complex gsum = 0.0;
  for (const Complex& gj : g) gsum += gj;
  d.dm = kPi * gsum.real();

  std::array<Complex, 4> wpk{};
  for (int k = 0; k < 4; ++k) wpk[k] = f.L.wp(z0 - f.z[k]);

  Complex da = f.eta1 * gsum;
  for (int j = 0; j < 4; ++j)
    if (g[j] != Complex(0.0, 0.0)) da += g[j] * wpk[j];
  d.da = da;

  // pole ordinate: time derivative of the residue identity solved for dz0
  Complex Q = 4.0 * f.L.wp(2.0 * z0);
  for (const Complex& w : wpk) Q -= w;
  if (std::abs(Q) < kPinch) {
    std::ostringstream os;
    os << "pole equation denominator |Q| = " << std::abs(Q) << " at t = " << s.t;
    throw Error(ErrorKind::SingularPinch, os.str());
  }
  Complex D = 4.0 * dzeta_domega2(2.0 * z0, f.L) - (4.0 * ncfg.beta / kPi) * dzeta_domega2(Complex(0.5, 0.0), f.L);
  for (int k = 0; k < 4; ++k) D -= 2.0 * dzeta_domega2(z0 - f.z[k], f.L);
  double dy0 = ((D - wpk[2] + wpk[3]) / Q).real() * d.dm;
  for (int k = 0; k < 4; ++k) dy0 -= (wpk[k] / Q).imag() * d.dx[k];
  d.dy0 = dy0;
  return d;
}

Complex residue_identity(const AccessoryState& s, double beta) {
  const Frame f(s, beta);
  Complex r = f.gamma - 2.0 * f.L.zeta(2.0 * f.z0);
  for (const Complex& zk : f.z) r += f.L.zeta(f.z0 - zk);
  return r;
}

ConstraintDefects constraint_defects(const AccessoryState& s, double beta) {
  ConstraintDefects c;
  c.sum_defect = std::abs(s.x[0] + s.x[1] + s.x[2] + s.x[3] - beta / kPi);
  c.residue_defect = std::abs(residue_identity(s, beta));
  return c;
}

namespace {

using Vec = std::array<double, 8>;

Vec pack(const AccessoryState& s) { return {s.x[0], s.x[1], s.x[2], s.x[3], s.m, s.y0, s.a.real(), s.a.imag()}; }

AccessoryState unpack(const Vec& y, double t) {
  AccessoryState s;
  s.x = {y[0], y[1], y[2], y[3]};
  s.m = y[4];
  s.y0 = y[5];
  s.a = {y[6], y[7]};
  s.t = t;
  return s;
}

Vec pack(const StateDerivative& d) {
  return {d.dx[0], d.dx[1], d.dx[2], d.dx[3], d.dm, d.dy0, d.da.real(), d.da.imag()};
}

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - bhat
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

bool plausible(const Vec& y) {
  for (double v : y)
    if (!std::isfinite(v)) return false;
  // m > 0 and the pole strictly inside (-m, 0)
  return y[4] > 0.0 && y[5] < 0.0 && y[5] > -y[4];
}

}  // namespace

Trajectory integrate(const AccessoryState& s0, const NormalizedConfig& ncfg, const IntegrationOptions& opt) {
  if (!(opt.rel_tol >= 1e-13 && opt.rel_tol <= 1e-6) || !(opt.abs_tol >= 1e-13 && opt.abs_tol <= 1e-6))
    throw Error(ErrorKind::InvalidArgument, "tolerances must lie in [1e-13, 1e-6]");
  if (!(opt.t_end > s0.t)) throw Error(ErrorKind::InvalidArgument, "t_end must exceed the start time");

  Trajectory tr;
  tr.samples.push_back(s0);
  tr.defect_log.push_back({s0.t, constraint_defects(s0, ncfg.beta)});

  double t = s0.t;
  Vec y = pack(s0);
  auto f = [&](double tt, const Vec& yy) {
    if (!plausible(yy)) throw Error(ErrorKind::SingularPinch, "state left the admissible region");
    return pack(rhs(unpack(yy, tt), ncfg));
  };

  Vec k1 = f(t, y);
  double h = std::min(opt.initial_step, opt.t_end - t);
  int rejected = 0;
  ErrorKind last_failure = ErrorKind::StepSizeUnderflow;
  std::string last_message;

  for (int step = 0; step < opt.max_steps; ++step) {
    if (t >= opt.t_end) return tr;
    bool last = false;
    if (t + h >= opt.t_end) {
      h = opt.t_end - t;
      last = true;
    }
    if (h < opt.min_step) {
      std::ostringstream os;
      os << "step size " << h << " below " << opt.min_step << " at t = " << t;
      if (!last_message.empty()) os << " (" << last_message << ")";
      throw IntegrationError(last_failure == ErrorKind::StepSizeUnderflow ? ErrorKind::StepSizeUnderflow : last_failure,
                             os.str(), tr.samples.back());
    }

    Vec ytmp{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, ynew{};
    bool ok = true;
    try {
      for (int i = 0; i < 8; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
      k2 = f(t + c2 * h, ytmp);
      for (int i = 0; i < 8; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      k3 = f(t + c3 * h, ytmp);
      for (int i = 0; i < 8; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      k4 = f(t + c4 * h, ytmp);
      for (int i = 0; i < 8; ++i) ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      k5 = f(t + c5 * h, ytmp);
      for (int i = 0; i < 8; ++i)
        ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      k6 = f(t + h, ytmp);
      for (int i = 0; i < 8; ++i)
        ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      k7 = f(t + h, ynew);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PoleProximity && e.kind() != ErrorKind::SingularPinch &&
          e.kind() != ErrorKind::OutOfRange)
        throw;
      ok = false;
      last_failure = e.kind() == ErrorKind::OutOfRange ? ErrorKind::SingularPinch : e.kind();
      last_message = e.what();
    }
    if (!ok) {
      h *= 0.5;
      ++rejected;
      continue;
    }

    double err = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double ei =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / 8.0);
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      tr.step_stats.push_back({t, h, err, rejected});
      rejected = 0;
      last_failure = ErrorKind::StepSizeUnderflow;
      last_message.clear();
      t = last ? opt.t_end : t + h;
      y = ynew;
      k1 = k7;
      const AccessoryState s = unpack(y, t);
      const ConstraintDefects cd = constraint_defects(s, ncfg.beta);
      tr.defect_log.push_back({t, cd});
      const double worst = std::max(cd.sum_defect, cd.residue_defect);
      if (worst > opt.max_defect) {
        std::ostringstream os;
        os << "constraint defect " << worst << " exceeds " << opt.max_defect << " at t = " << t;
        throw IntegrationError(ErrorKind::DefectBlowup, os.str(), tr.samples.back());
      }
      if (worst > opt.warn_defect) ++tr.defect_warnings;
      tr.samples.push_back(s);
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h *= fac;
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      ++rejected;
    }
  }
  throw IntegrationError(ErrorKind::StepSizeUnderflow, "step budget exhausted", tr.samples.back());
}

Trajectory integrate(const AccessoryState& s0, const NormalizedConfig& ncfg, double rel_tol, double abs_tol) {
  IntegrationOptions o;
  o.rel_tol = rel_tol;
  o.abs_tol = abs_tol;
  return integrate(s0, ncfg, o);
}

}  // namespace slitcap
