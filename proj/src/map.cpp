#include "slitcap/map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "slitcap/error.hpp"

namespace slitcap {

namespace {

constexpr double kPathClearance = 1e-3;
constexpr int kMaxDepth = 40;

// 15-point Kronrod nodes and weights on [-1, 1], with the embedded 7-point Gauss weights
constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  Complex value;
  double error;
  double mass;  // integral of |f'|, sets the round-off floor
};

Panel gk15(const MapData& md, Complex a, Complex b) {
  const Complex mid = 0.5 * (a + b);
  const Complex half = 0.5 * (b - a);
  const Complex fc = map_derivative(mid, md);
  Complex kron = wgk[7] * fc;
  Complex gauss = wg[3] * fc;
  double mass = wgk[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    const Complex f1 = map_derivative(mid - half * xgk[j], md);
    const Complex f2 = map_derivative(mid + half * xgk[j], md);
    kron += wgk[j] * (f1 + f2);
    mass += wgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += wg[j / 2] * (f1 + f2);
  }
  return {kron * half, std::abs((kron - gauss) * half), mass * std::abs(half)};
}

Complex adaptive(const MapData& md, Complex a, Complex b, double tol, int depth) {
  const Panel p = gk15(md, a, b);
  if (p.error <= std::max(tol, 1e-14 * p.mass)) return p.value;
  if (depth >= kMaxDepth) {
    std::ostringstream os;
    os << "no convergence on [" << a << ", " << b << "], error estimate " << p.error;
    throw Error(ErrorKind::QuadratureFailure, os.str());
  }
  const Complex m = 0.5 * (a + b);
  return adaptive(md, a, m, 0.5 * tol, depth + 1) + adaptive(md, m, b, 0.5 * tol, depth + 1);
}

double point_segment_distance(Complex p, Complex a, Complex b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

// distance from the segment to the nearest copy of +-z0 on the lattice (1, 2mi)
double pole_clearance(const MapData& md, Complex a, Complex b) {
  const double m2 = 2.0 * md.state.m;
  const double y0 = md.state.y0;
  const double xlo = std::floor(std::min(a.real(), b.real())) - 1.0;
  const double xhi = std::ceil(std::max(a.real(), b.real())) + 1.0;
  const double ylo = std::min(a.imag(), b.imag()) - m2;
  const double yhi = std::max(a.imag(), b.imag()) + m2;
  double best = 1e300;
  for (double sgn : {1.0, -1.0}) {
    const double yp = sgn * y0;
    const int klo = int(std::floor((ylo - yp) / m2));
    const int khi = int(std::ceil((yhi - yp) / m2));
    for (int k = klo; k <= khi; ++k) {
      for (double n = xlo; n <= xhi; n += 1.0) {
        best = std::min(best, point_segment_distance(Complex(n, yp + k * m2), a, b));
      }
    }
  }
  return best;
}

bool admissible(const MapData& md, const std::vector<Complex>& path) {
  for (size_t i = 0; i + 1 < path.size(); ++i)
    if (pole_clearance(md, path[i], path[i + 1]) < kPathClearance) return false;
  return true;
}

double path_tolerance(const MapData& md) { return 1e-10 * std::max(std::abs(md.c), 1e-300); }

Complex integrate_path(const MapData& md, const std::vector<Complex>& path) {
  Complex s = 0.0;
  double total = 0.0;
  for (size_t i = 0; i + 1 < path.size(); ++i) total += std::abs(path[i + 1] - path[i]);
  const double tol = path_tolerance(md);
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const double share = total > 0.0 ? std::abs(path[i + 1] - path[i]) / total : 1.0;
    s += integrate_segment(md, path[i], path[i + 1], tol * share);
  }
  return s;
}

}  // namespace

Complex recover_scale(const AccessoryState& s, double beta) {
  const Lattice L(2.0 * s.m);
  const Complex z0 = s.z0();
  const Complex gamma = beta / kPi * L.eta1();
  Complex p = 1.0;
  for (const Complex& zk : s.zs()) {
    if (L.distance_to_lattice(z0 - zk) < 1e-10) throw Error(ErrorKind::PoleProximity, "pole meets a critical point");
    p *= L.sigma(z0 - zk);
  }
  const Complex s2 = L.sigma(2.0 * z0);
  return -std::exp(s.a) * std::exp(-gamma * z0) * s2 * s2 / p;
}

MapData make_map(const AccessoryState& s, const NormalizedConfig& n) {
  MapData md;
  md.state = s;
  md.beta = n.beta;
  md.lattice = Lattice(2.0 * s.m);
  md.gamma = n.beta / kPi * md.lattice.eta1();
  md.c = recover_scale(s, n.beta);
  md.base = Complex(s.x[2], -s.m);
  md.base_value = n.endpoints_at(s.t)[2];
  md.frame = n.frame;
  md.renumbering = n.renumbering;
  md.c1 = map_eval(Complex(0.0, 0.0), md);
  return md;
}

Complex map_derivative(Complex z, const MapData& md) {
  const Lattice& L = md.lattice;
  const Complex z0 = md.state.z0();
  if (L.distance_to_lattice(z - z0) < 1e-12 || L.distance_to_lattice(z + z0) < 1e-12) {
    std::ostringstream os;
    os << "f' has a pole at " << z;
    throw Error(ErrorKind::PoleProximity, os.str());
  }
  Complex num = md.c * std::exp(md.gamma * z);
  for (const Complex& zk : md.state.zs()) num *= L.sigma(z - zk);
  const Complex a = L.sigma(z - z0);
  const Complex b = L.sigma(z + z0);
  return num / (a * a * b * b);
}

Complex integrate_segment(const MapData& md, Complex a, Complex b, double tol) {
  if (a == b) return 0.0;
  // a few panels per unit length so the error estimate sees the geometry
  const int panels = std::max(1, int(std::ceil(std::abs(b - a) / 0.125)));
  Complex s = 0.0;
  for (int i = 0; i < panels; ++i) {
    const Complex pa = a + (b - a) * (double(i) / panels);
    const Complex pb = a + (b - a) * (double(i + 1) / panels);
    s += adaptive(md, pa, pb, tol / panels, 0);
  }
  return s;
}

Complex map_eval(Complex z, const MapData& md, Complex base, Complex base_value) {
  if (admissible(md, {base, z})) return base_value + integrate_path(md, {base, z});

  // f has period 1; move the target next to the base point
  const double shift = std::round(z.real() - base.real());
  const Complex zs = z - shift;
  if (admissible(md, {base, zs})) return base_value + integrate_path(md, {base, zs});

  // vertical legs on a half-integer column, away from the pole columns Re z = n
  const double col = std::floor(0.5 * (base.real() + zs.real())) + 0.5;
  const double m = md.state.m;
  const double y0 = md.state.y0;
  // a horizontal level between the pole row and the nearer boundary line
  const double safe_hi = 0.5 * y0, safe_lo = 0.5 * (y0 - m);
  std::vector<std::vector<Complex>> candidates = {
      {base, Complex(col, base.imag()), Complex(col, zs.imag()), zs},
      {base, Complex(base.real(), safe_hi), Complex(zs.real(), safe_hi), zs},
      {base, Complex(base.real(), safe_lo), Complex(zs.real(), safe_lo), zs},
      {base, Complex(col, base.imag()), Complex(col, safe_hi), Complex(zs.real(), safe_hi), zs},
      {base, Complex(col, base.imag()), Complex(col, safe_lo), Complex(zs.real(), safe_lo), zs},
  };
  for (const auto& path : candidates)
    if (admissible(md, path)) return base_value + integrate_path(md, path);

  std::ostringstream os;
  os << "no admissible path from " << base << " to " << z;
  throw Error(ErrorKind::PathBlocked, os.str());
}

Complex map_eval(Complex z, const MapData& md) { return map_eval(z, md, md.base, md.base_value); }

BoundaryTrace boundary_trace(const MapData& md, const SlitConfig& target, int n) {
  if (n < 64) throw Error(ErrorKind::InvalidArgument, "boundary_trace needs at least 64 samples per line");
  const double m = md.state.m;
  const Complex lo0(md.state.x[2], -m);
  const Complex up0(md.state.x[0], 0.0);
  const double tol = path_tolerance(md) / n;

  // segment integrals are independent; accumulate afterwards
  std::vector<Complex> dlo(n), dup(n);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < n; ++j) {
    const double a = double(j) / n, b = double(j + 1) / n;
    dlo[j] = integrate_segment(md, lo0 + a, lo0 + b, tol);
    dup[j] = integrate_segment(md, up0 + a, up0 + b, tol);
  }

  BoundaryTrace tr;
  std::vector<Complex> flo(n + 1), fup(n + 1);
  flo[0] = md.base_value;
  fup[0] = map_eval(up0, md);
  for (int j = 0; j < n; ++j) {
    flo[j + 1] = flo[j] + dlo[j];
    fup[j + 1] = fup[j] + dup[j];
  }
  tr.closure_error = std::max(std::abs(flo[n] - flo[0]), std::abs(fup[n] - fup[0]));

  const auto pts = target.points();
  const auto& src = md.renumbering.source;
  auto line_distance = [](Complex p, Complex a, Complex b) {
    const Complex d = (b - a) / std::abs(b - a);
    return std::abs(((p - a) * std::conj(d)).imag());
  };
  const Complex u1 = pts[src[0]], u2 = pts[src[1]], l1 = pts[src[2]], l2 = pts[src[3]];
  for (int j = 0; j < n; ++j) {
    const Complex pu = md.frame.to_physical(fup[j]);
    const Complex pl = md.frame.to_physical(flo[j]);
    tr.upper.push_back(pu);
    tr.lower.push_back(pl);
    tr.max_line_deviation = std::max({tr.max_line_deviation, line_distance(pu, u1, u2), line_distance(pl, l1, l2)});
  }

  // critical points: z1, z2 on the upper line, z3, z4 on the lower one
  const std::array<Complex, 4> zk{Complex(md.state.x[0], 0.0), Complex(md.state.x[1], 0.0),
                                  Complex(md.state.x[2], -m), Complex(md.state.x[3], -m)};
  for (int k = 0; k < 4; ++k) {
    const Complex fk = k < 2 ? map_eval(zk[k], md, up0, fup[0]) : map_eval(zk[k], md);
    tr.endpoint_errors[src[k]] = std::abs(md.frame.to_physical(fk) - pts[src[k]]);
  }
  return tr;
}

}  // namespace slitcap
