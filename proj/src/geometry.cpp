#include "slitcap/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "slitcap/error.hpp"

namespace slitcap {

namespace {

constexpr double kMinLength = 1e-9;
constexpr double kMinGap = 1e-9;
constexpr double kParallelTol = 1e-12;
constexpr double kNearlyParallel = 1e-6;
constexpr double kDetTol = 1e-14;
constexpr double kOnSegment = 1e-9;

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

double point_segment_distance(Complex p, Complex a, Complex b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p - a) * std::conj(d)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

bool segments_cross(Complex p0, Complex p1, Complex q0, Complex q1) {
  const double d1 = cross(p1 - p0, q0 - p0);
  const double d2 = cross(p1 - p0, q1 - p0);
  const double d3 = cross(q1 - q0, p0 - q0);
  const double d4 = cross(q1 - q0, p1 - q0);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

// length of the larger slit; all absolute thresholds are relative to it
double scale_of(const SlitConfig& c) { return std::max(std::abs(c.a2 - c.a1), std::abs(c.a4 - c.a3)); }

void check_admissible(const SlitConfig& c) {
  for (const Complex& p : c.points()) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
      throw Error(ErrorKind::InvalidArgument, "non-finite endpoint");
  }
  const double s = scale_of(c);
  if (!(s > 0.0)) throw Error(ErrorKind::DegenerateGeometry, "both slits have zero length");
  if (std::abs(c.a2 - c.a1) < kMinLength * s || std::abs(c.a4 - c.a3) < kMinLength * s)
    throw Error(ErrorKind::DegenerateGeometry, "slit shorter than 1e-9 of the configuration");
  if (segment_distance(c.a1, c.a2, c.a3, c.a4) < kMinGap * s)
    throw Error(ErrorKind::DegenerateGeometry, "slits intersect or touch");
}

}  // namespace

double SlitConfig::diameter() const {
  const auto p = points();
  double d = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) d = std::max(d, std::abs(p[i] - p[j]));
  return d;
}

std::string to_string(SlitCase c) { return c == SlitCase::Generic ? "generic" : "parallel"; }

double segment_distance(Complex p0, Complex p1, Complex q0, Complex q1) {
  if (segments_cross(p0, p1, q0, q1)) return 0.0;
  return std::min({point_segment_distance(p0, q0, q1), point_segment_distance(p1, q0, q1),
                   point_segment_distance(q0, p0, p1), point_segment_distance(q1, p0, p1)});
}

std::array<Complex, 4> NormalizedConfig::endpoints_at(double t) const {
  std::array<Complex, 4> e = start;
  e[0] += t * v1;
  e[1] += t * v2;
  return e;
}

std::array<Complex, 4> NormalizedConfig::physical_target() const {
  std::array<Complex, 4> p{};
  for (int k = 0; k < 4; ++k) p[k] = frame.to_physical(target[k]);
  return p;
}

SlitCase classify(const SlitConfig& cfg) {
  check_admissible(cfg);
  const Complex d1 = cfg.a2 - cfg.a1;
  const Complex d2 = cfg.a4 - cfg.a3;
  const double c = std::abs(cross(d2, d1));
  const double norm = std::abs(d1) * std::abs(d2);
  if (c < kParallelTol * norm) {
    // same carrier?
    const double offset = std::abs(cross(d1, cfg.a3 - cfg.a1)) / std::abs(d1);
    if (offset < kMinGap * scale_of(cfg)) throw Error(ErrorKind::DegenerateGeometry, "collinear slits");
    return SlitCase::Parallel;
  }
  if (c < kNearlyParallel * norm)
    throw Error(ErrorKind::DegenerateGeometry, "carrier lines are nearly parallel (angle < 1e-6)");
  return SlitCase::Generic;
}

NormalizedConfig normalize_generic(const SlitConfig& cfg) {
  if (classify(cfg) != SlitCase::Generic)
    throw Error(ErrorKind::InvalidArgument, "normalize_generic called on parallel slits");
  const double s = scale_of(cfg);

  std::array<Complex, 4> p = cfg.points();
  std::array<int, 4> src{0, 1, 2, 3};

  const Complex d12 = p[0] - p[1];
  const Complex d34 = p[2] - p[3];
  const double den = (d12 * std::conj(d34)).imag();
  if (std::abs(den) < kDetTol * std::abs(d12) * std::abs(d34))
    throw Error(ErrorKind::DegenerateGeometry, "carrier lines do not intersect");
  const Complex a5 = p[1] + d12 * ((p[3] - p[1]) * std::conj(d34)).imag() / den;

  Renumbering ren;
  const double tol = kOnSegment * s;
  const bool on12 = point_segment_distance(a5, p[0], p[1]) < tol;
  const bool on34 = point_segment_distance(a5, p[2], p[3]) < tol;
  if (on12 && on34) throw Error(ErrorKind::DegenerateGeometry, "slits meet at a point");
  if (on34) {
    std::swap(p[0], p[2]);
    std::swap(p[1], p[3]);
    std::swap(src[0], src[2]);
    std::swap(src[1], src[3]);
    ren.swapped_slits = true;
  }
  auto swap_pair = [&](int i, int j) {
    std::swap(p[i], p[j]);
    std::swap(src[i], src[j]);
  };
  if (std::abs(p[2] - a5) > std::abs(p[3] - a5)) swap_pair(2, 3);

  const bool interior =
      point_segment_distance(a5, p[0], p[1]) < tol && std::abs(p[0] - a5) >= tol && std::abs(p[1] - a5) >= tol;
  if (interior) {
    if (((p[1] - a5) / (p[3] - a5)).imag() < 0.0) swap_pair(0, 1);
  } else if (std::abs(p[0] - a5) > std::abs(p[1] - a5)) {
    swap_pair(0, 1);
  }

  double beta = std::arg((p[1] - p[0]) / (p[3] - p[2]));
  Complex origin = a5;
  if (beta < 0.0) {
    // mirror image has the same module
    for (auto& q : p) q = std::conj(q);
    origin = std::conj(a5);
    beta = -beta;
    ren.reflected = true;
  }
  ren.source = src;

  // w = exp(-i phi) (p - A5) puts A3A4 on arg w = -beta/2
  const double phi = std::arg(p[3] - origin) + beta / 2.0;
  const Complex rot = std::polar(1.0, phi);

  NormalizedConfig n;
  n.case_tag = SlitCase::Generic;
  n.a5 = a5;
  n.beta = beta;
  n.l2 = std::abs(p[1] - origin);
  n.l3 = std::abs(p[2] - origin);
  n.l4 = std::abs(p[3] - origin);
  const double r1 = std::abs(p[0] - origin);
  if (r1 < tol) {
    n.l1 = 0.0;
  } else {
    const double side = ((p[0] - origin) * std::conj(p[1] - origin)).real();
    n.l1 = side < 0.0 ? -r1 : r1;
  }
  n.fixed_length = n.l4 - n.l3;
  const Complex up = std::polar(1.0, beta / 2.0);
  const Complex down = std::conj(up);
  n.v1 = (n.l1 - n.l3) * up;
  n.v2 = (n.l2 - n.l4) * up;
  n.target = {n.l1 * up, n.l2 * up, n.l3 * down, n.l4 * down};
  n.start = {n.l3 * up, n.l4 * up, n.l3 * down, n.l4 * down};

  if (ren.reflected) {
    // physical = conj(origin + rot w) = conj(origin) + conj(rot) conj(w)
    n.frame = RigidMotion{std::conj(origin), std::conj(rot), true};
  } else {
    n.frame = RigidMotion{origin, rot, false};
  }
  n.renumbering = ren;
  return n;
}

NormalizedConfig normalize_parallel(const SlitConfig& cfg) {
  if (classify(cfg) != SlitCase::Parallel)
    throw Error(ErrorKind::InvalidArgument, "normalize_parallel called on non-parallel slits");

  std::array<Complex, 4> p = cfg.points();
  std::array<int, 4> src{0, 1, 2, 3};
  Renumbering ren;

  // rotate so that A1A2 is horizontal
  Complex r = std::conj(p[1] - p[0]) / std::abs(p[1] - p[0]);
  std::array<Complex, 4> q{};
  for (int k = 0; k < 4; ++k) q[k] = r * p[k];
  const double y12 = 0.5 * (q[0].imag() + q[1].imag());
  const double y34 = 0.5 * (q[2].imag() + q[3].imag());
  if (std::abs(y12 - y34) < kMinGap * scale_of(cfg))
    throw Error(ErrorKind::DegenerateGeometry, "slits share a carrier line");
  if (y12 < y34) {
    r = -r;
    for (auto& z : q) z = -z;
  }
  auto swap_pair = [&](int i, int j) {
    std::swap(q[i], q[j]);
    std::swap(src[i], src[j]);
  };
  if (q[0].real() > q[1].real()) swap_pair(0, 1);
  if (q[2].real() > q[3].real()) swap_pair(2, 3);
  ren.source = src;

  const double top = 0.5 * (q[0].imag() + q[1].imag());
  const double bottom = 0.5 * (q[2].imag() + q[3].imag());
  const double b = 0.5 * (top - bottom);
  const double len = q[3].real() - q[2].real();
  const Complex shift{0.5 * (q[2].real() + q[3].real()), bottom + b};

  NormalizedConfig n;
  n.case_tag = SlitCase::Parallel;
  n.beta = 0.0;
  n.half_gap = b;
  n.fixed_length = len;
  n.l1 = q[0].real() - shift.real();
  n.l2 = q[1].real() - shift.real();
  n.l3 = -0.5 * len;
  n.l4 = 0.5 * len;
  n.v1 = q[0].real() - q[2].real();
  n.v2 = q[1].real() - q[3].real();
  n.start = {Complex{-0.5 * len, b}, Complex{0.5 * len, b}, Complex{-0.5 * len, -b}, Complex{0.5 * len, -b}};
  n.target = {n.start[0] + n.v1, n.start[1] + n.v2, n.start[2], n.start[3]};
  // w = r p - shift  =>  p = conj(r) (w + shift)
  n.frame = RigidMotion{std::conj(r) * shift, std::conj(r), false};
  n.renumbering = ren;
  return n;
}

NormalizedConfig normalize(const SlitConfig& cfg) {
  return classify(cfg) == SlitCase::Generic ? normalize_generic(cfg) : normalize_parallel(cfg);
}

}  // namespace slitcap
