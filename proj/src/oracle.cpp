#include "slitcap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "slitcap/error.hpp"

namespace slitcap {

namespace {

constexpr int kCoarsest = 12;
constexpr int kSmooth = 1;
constexpr int kCoarseSweeps = 20;

// coarse nodes are a subset of fine nodes: every other one, plus the last
struct AxisMap {
  std::vector<double> coarse;
  std::vector<int> idx;     // coarse k -> fine index
  std::vector<int> left;    // fine i -> coarse interval
  std::vector<double> t;    // weight of coarse left + 1
  std::vector<int> rptr;    // coarse k -> range of (fine index, weight) in ri/rw
  std::vector<int> ri;
  std::vector<double> rw;
};

AxisMap coarsen(const std::vector<double>& x) {
  AxisMap a;
  const int n = int(x.size());
  for (int i = 0; i < n; i += 2) a.idx.push_back(i);
  if (a.idx.back() != n - 1) a.idx.push_back(n - 1);
  for (int k : a.idx) a.coarse.push_back(x[k]);
  const int nc = int(a.idx.size());
  a.left.resize(n);
  a.t.resize(n);
  for (int k = 0; k + 1 < nc; ++k) {
    for (int i = a.idx[k]; i < a.idx[k + 1]; ++i) {
      a.left[i] = k;
      a.t[i] = (x[i] - x[a.idx[k]]) / (x[a.idx[k + 1]] - x[a.idx[k]]);
    }
  }
  a.left[n - 1] = nc - 1;
  a.t[n - 1] = 0.0;
  a.rptr.push_back(0);
  for (int k = 0; k < nc; ++k) {
    const int lo = k > 0 ? a.idx[k - 1] + 1 : 0;
    const int hi = k + 1 < nc ? a.idx[k + 1] - 1 : n - 1;
    for (int i = lo; i <= hi; ++i) {
      const double w = a.left[i] == k ? 1.0 - a.t[i] : a.t[i];
      if (w != 0.0) {
        a.ri.push_back(i);
        a.rw.push_back(w);
      }
    }
    a.rptr.push_back(int(a.ri.size()));
  }
  return a;
}

std::vector<double> dual_widths(const std::vector<double>& x) {
  const int n = int(x.size());
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    const double lo = i > 0 ? x[i - 1] : x[i];
    const double hi = i + 1 < n ? x[i + 1] : x[i];
    w[i] = 0.5 * (hi - lo);
  }
  return w;
}

double dot(const std::vector<double>& a, const std::vector<double>& b, Exec ex) {
  const long n = long(a.size());
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) if (ex == Exec::Parallel)
  for (long i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

GridProblem::GridProblem(std::vector<double> x, std::vector<double> y, std::vector<std::uint8_t> fixed,
                         std::vector<double> value)
    : x_(std::move(x)), y_(std::move(y)), fixed_(std::move(fixed)), value_(std::move(value)) {
  if (x_.size() < 3 || y_.size() < 3) throw Error(ErrorKind::InvalidArgument, "grid needs at least 3 nodes per axis");
  if (fixed_.size() != x_.size() * y_.size() || value_.size() != fixed_.size())
    throw Error(ErrorKind::InvalidArgument, "grid mask size mismatch");
  wx_ = dual_widths(x_);
  wy_ = dual_widths(y_);
  for (size_t i = 0; i + 1 < x_.size(); ++i) dx_.push_back(x_[i + 1] - x_[i]);
  for (size_t j = 0; j + 1 < y_.size(); ++j) dy_.push_back(y_[j + 1] - y_[j]);
  for (double d : dx_)
    if (!(d > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid axis must increase");
  for (double d : dy_)
    if (!(d > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid axis must increase");
}

size_t GridProblem::free_count() const { return size_t(std::count(fixed_.begin(), fixed_.end(), 0)); }

void GridProblem::apply(const std::vector<double>& u, std::vector<double>& out, Exec ex) const {
  const int nx = this->nx(), ny = this->ny();
  out.resize(u.size());
#pragma omp parallel for if (ex == Exec::Parallel)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const size_t p = size_t(j) * nx + i;
      if (fixed_[p]) {
        out[p] = 0.0;
        continue;
      }
      auto val = [&](size_t q) { return fixed_[q] ? 0.0 : u[q]; };
      double s = 0.0, d = 0.0;
      if (i > 0) { const double k = wy_[j] / dx_[i - 1]; d += k; s += k * val(p - 1); }
      if (i + 1 < nx) { const double k = wy_[j] / dx_[i]; d += k; s += k * val(p + 1); }
      if (j > 0) { const double k = wx_[i] / dy_[j - 1]; d += k; s += k * val(p - nx); }
      if (j + 1 < ny) { const double k = wx_[i] / dy_[j]; d += k; s += k * val(p + nx); }
      out[p] = d * u[p] - s;
    }
  }
}

double GridProblem::energy(const std::vector<double>& u, Exec ex) const {
  const int nx = this->nx(), ny = this->ny();
  double e = 0.0;
#pragma omp parallel for reduction(+ : e) if (ex == Exec::Parallel)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const size_t p = size_t(j) * nx + i;
      if (i + 1 < nx) { const double d = u[p + 1] - u[p]; e += wy_[j] / dx_[i] * d * d; }
      if (j + 1 < ny) { const double d = u[p + nx] - u[p]; e += wx_[i] / dy_[j] * d * d; }
    }
  }
  return e;
}

/// Symmetric V-cycle: alternating zebra line relaxation (the graded arms are strongly
/// anisotropic), rediscretized coarse operators, bilinear transfer.
class Multigrid {
 public:
  Multigrid(const GridProblem& fine, Exec ex) : fine_(fine), ex_(ex) {
    const GridProblem* g = &fine;
    while (std::min(g->nx(), g->ny()) > kCoarsest) {
      AxisMap mx = coarsen(g->x_), my = coarsen(g->y_);
      const int cx = int(mx.coarse.size()), cy = int(my.coarse.size());
      std::vector<std::uint8_t> fixed(size_t(cx) * cy, 0);
      // a coarse node is fixed if any fine node within one fine step is
      for (int l = 0; l < cy; ++l) {
        for (int k = 0; k < cx; ++k) {
          const int i0 = mx.idx[k], j0 = my.idx[l];
          bool f = false;
          for (int j = std::max(0, j0 - 1); j <= std::min(g->ny() - 1, j0 + 1) && !f; ++j)
            for (int i = std::max(0, i0 - 1); i <= std::min(g->nx() - 1, i0 + 1) && !f; ++i)
              f = g->fixed_[size_t(j) * g->nx() + i] != 0;
          fixed[size_t(l) * cx + k] = f;
        }
      }
      levels_.emplace_back(mx.coarse, my.coarse, fixed, std::vector<double>(fixed.size(), 0.0));
      mx_.push_back(std::move(mx));
      my_.push_back(std::move(my));
      g = &levels_.back();
    }
    const int nl = int(levels_.size()) + 1;
    b_.resize(nl);
    u_.resize(nl);
    r_.resize(nl);
    for (int l = 0; l < nl; ++l) {
      const size_t n = size_t(level(l).nx()) * level(l).ny();
      b_[l].assign(n, 0.0);
      u_[l].assign(n, 0.0);
      r_[l].assign(n, 0.0);
    }
  }

  int depth() const { return int(levels_.size()) + 1; }

  void precondition(const std::vector<double>& r, std::vector<double>& z) {
    b_[0] = r;
    vcycle(0);
    z = u_[0];
  }

 private:
  const GridProblem& level(int l) const { return l == 0 ? fine_ : levels_[l - 1]; }

  // zebra line relaxation: every other row (dir 0) or column (dir 1) solved exactly
  void line_sweep(int l, int dir, int color) {
    const GridProblem& g = level(l);
    const int nx = g.nx(), ny = g.ny();
    const int nlines = dir == 0 ? ny : nx, len = dir == 0 ? nx : ny;
    const size_t stride = dir == 0 ? 1 : size_t(nx);
    const std::vector<double>& b = b_[l];
    std::vector<double>& u = u_[l];
#pragma omp parallel if (ex_ == Exec::Parallel)
    {
      std::vector<double> lo(len), di(len), up(len), rh(len);
#pragma omp for
      for (int line = color; line < nlines; line += 2) {
        const size_t base = dir == 0 ? size_t(line) * nx : size_t(line);
        for (int s = 0; s < len; ++s) {
          const size_t p = base + s * stride;
          const int i = dir == 0 ? s : line, j = dir == 0 ? line : s;
          if (g.fixed_[p]) {
            lo[s] = up[s] = rh[s] = 0.0;
            di[s] = 1.0;
            continue;
          }
          const double kw = i > 0 ? g.wy_[j] / g.dx_[i - 1] : 0.0;
          const double ke = i + 1 < nx ? g.wy_[j] / g.dx_[i] : 0.0;
          const double ks = j > 0 ? g.wx_[i] / g.dy_[j - 1] : 0.0;
          const double kn = j + 1 < ny ? g.wx_[i] / g.dy_[j] : 0.0;
          di[s] = kw + ke + ks + kn;
          double r = b[p];
          if (dir == 0) {
            lo[s] = s > 0 && !g.fixed_[p - 1] ? -kw : 0.0;
            up[s] = s + 1 < len && !g.fixed_[p + 1] ? -ke : 0.0;
            if (j > 0) r += ks * u[p - nx];
            if (j + 1 < ny) r += kn * u[p + nx];
          } else {
            lo[s] = s > 0 && !g.fixed_[p - nx] ? -ks : 0.0;
            up[s] = s + 1 < len && !g.fixed_[p + nx] ? -kn : 0.0;
            if (i > 0) r += kw * u[p - 1];
            if (i + 1 < nx) r += ke * u[p + 1];
          }
          rh[s] = r;
        }
        // Thomas algorithm
        for (int s = 1; s < len; ++s) {
          const double w = lo[s] / di[s - 1];
          di[s] -= w * up[s - 1];
          rh[s] -= w * rh[s - 1];
        }
        rh[len - 1] /= di[len - 1];
        for (int s = len - 2; s >= 0; --s) rh[s] = (rh[s] - up[s] * rh[s + 1]) / di[s];
        for (int s = 0; s < len; ++s) u[base + s * stride] = rh[s];
      }
    }
  }

  void smooth_forward(int l) {
    line_sweep(l, 0, 0);
    line_sweep(l, 0, 1);
    line_sweep(l, 1, 0);
    line_sweep(l, 1, 1);
  }

  void smooth_backward(int l) {
    line_sweep(l, 1, 1);
    line_sweep(l, 1, 0);
    line_sweep(l, 0, 1);
    line_sweep(l, 0, 0);
  }

  void restrict_residual(int l) {
    const GridProblem& c = level(l + 1);
    const AxisMap& mx = mx_[l];
    const AxisMap& my = my_[l];
    const int fnx = level(l).nx(), cnx = c.nx(), cny = c.ny();
    const std::vector<double>& r = r_[l];
    std::vector<double>& bc = b_[l + 1];
#pragma omp parallel for if (ex_ == Exec::Parallel)
    for (int L = 0; L < cny; ++L) {
      for (int K = 0; K < cnx; ++K) {
        const size_t q = size_t(L) * cnx + K;
        if (c.fixed_[q]) {
          bc[q] = 0.0;
          continue;
        }
        double s = 0.0;
        for (int b = my.rptr[L]; b < my.rptr[L + 1]; ++b) {
          const size_t row = size_t(my.ri[b]) * fnx;
          double t = 0.0;
          for (int a = mx.rptr[K]; a < mx.rptr[K + 1]; ++a) t += mx.rw[a] * r[row + mx.ri[a]];
          s += my.rw[b] * t;
        }
        bc[q] = s;
      }
    }
  }

  void prolong_add(int l) {
    const GridProblem& f = level(l);
    const AxisMap& mx = mx_[l];
    const AxisMap& my = my_[l];
    const int fnx = f.nx(), fny = f.ny(), cnx = level(l + 1).nx();
    const std::vector<double>& uc = u_[l + 1];
    std::vector<double>& u = u_[l];
#pragma omp parallel for if (ex_ == Exec::Parallel)
    for (int j = 0; j < fny; ++j) {
      const int L = my.left[j];
      const double ty = my.t[j];
      for (int i = 0; i < fnx; ++i) {
        const size_t p = size_t(j) * fnx + i;
        if (f.fixed_[p]) continue;
        const int K = mx.left[i];
        const double tx = mx.t[i];
        const size_t q = size_t(L) * cnx + K;
        double v = (1.0 - tx) * uc[q];
        if (tx != 0.0) v += tx * uc[q + 1];
        v *= 1.0 - ty;
        if (ty != 0.0) {
          double w = (1.0 - tx) * uc[q + cnx];
          if (tx != 0.0) w += tx * uc[q + cnx + 1];
          v += ty * w;
        }
        u[p] += v;
      }
    }
  }

  void vcycle(int l) {
    std::fill(u_[l].begin(), u_[l].end(), 0.0);
    if (l + 1 == depth()) {
      for (int s = 0; s < kCoarseSweeps; ++s) {
        smooth_forward(l);
        smooth_backward(l);
      }
      return;
    }
    for (int s = 0; s < kSmooth; ++s) smooth_forward(l);
    level(l).apply(u_[l], r_[l], ex_);
    const long n = long(r_[l].size());
    const std::vector<double>& b = b_[l];
    std::vector<double>& r = r_[l];
#pragma omp parallel for if (ex_ == Exec::Parallel)
    for (long i = 0; i < n; ++i) r[i] = b[i] - r[i];
    restrict_residual(l);
    vcycle(l + 1);
    prolong_add(l);
    for (int s = 0; s < kSmooth; ++s) smooth_backward(l);
  }

  const GridProblem& fine_;
  Exec ex_;
  std::vector<GridProblem> levels_;
  std::vector<AxisMap> mx_, my_;
  std::vector<std::vector<double>> b_, u_, r_;
};

GridResult grid_solve(const GridProblem& p, Exec ex, double tol, int max_iter) {
  const int nx = p.nx(), ny = p.ny();
  const size_t n = size_t(nx) * ny;
  const auto& fixed = p.fixed();
  std::vector<double> lift(n, 0.0);
  for (size_t q = 0; q < n; ++q)
    if (fixed[q]) lift[q] = p.value()[q];

  // right-hand side: couplings of free nodes to fixed neighbours
  std::vector<double> b(n, 0.0);
  {
    const std::vector<double>& x = p.x();
    const std::vector<double>& y = p.y();
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const size_t q = size_t(j) * nx + i;
        if (fixed[q]) continue;
        const double wxi = 0.5 * ((i + 1 < nx ? x[i + 1] : x[i]) - (i > 0 ? x[i - 1] : x[i]));
        const double wyj = 0.5 * ((j + 1 < ny ? y[j + 1] : y[j]) - (j > 0 ? y[j - 1] : y[j]));
        double s = 0.0;
        if (i > 0 && fixed[q - 1]) s += wyj / (x[i] - x[i - 1]) * lift[q - 1];
        if (i + 1 < nx && fixed[q + 1]) s += wyj / (x[i + 1] - x[i]) * lift[q + 1];
        if (j > 0 && fixed[q - nx]) s += wxi / (y[j] - y[j - 1]) * lift[q - nx];
        if (j + 1 < ny && fixed[q + nx]) s += wxi / (y[j + 1] - y[j]) * lift[q + nx];
        b[q] = s;
      }
    }
  }

  GridResult res;
  res.nx = nx;
  res.ny = ny;
  std::vector<double> v(n, 0.0), r = b, z(n), d(n), ad(n);
  const double bnorm = std::sqrt(dot(b, b, ex));
  if (bnorm == 0.0) {
    res.u = lift;
    res.capacity = p.energy(lift, ex);
    return res;
  }
  Multigrid mg(p, ex);
  mg.precondition(r, z);
  d = z;
  double rz = dot(r, z, ex);
  const long nn = long(n);
  for (int it = 1; it <= max_iter; ++it) {
    p.apply(d, ad, ex);
    const double alpha = rz / dot(d, ad, ex);
#pragma omp parallel for if (ex == Exec::Parallel)
    for (long i = 0; i < nn; ++i) {
      v[i] += alpha * d[i];
      r[i] -= alpha * ad[i];
    }
    res.iterations = it;
    res.relative_residual = std::sqrt(dot(r, r, ex)) / bnorm;
    if (res.relative_residual <= tol) break;
    mg.precondition(r, z);
    const double rz_new = dot(r, z, ex);
    const double beta = rz_new / rz;
    rz = rz_new;
#pragma omp parallel for if (ex == Exec::Parallel)
    for (long i = 0; i < nn; ++i) d[i] = z[i] + beta * d[i];
  }
  if (res.relative_residual > tol) {
    std::ostringstream os;
    os << "grid solve stopped at relative residual " << res.relative_residual << " after " << max_iter
       << " iterations";
    throw Error(ErrorKind::NonConvergence, os.str());
  }
  for (size_t q = 0; q < n; ++q) v[q] += lift[q];
  res.capacity = p.energy(v, ex);
  res.u = std::move(v);
  return res;
}

std::vector<double> graded_axis(double core_lo, double core_hi, double box_lo, double box_hi, double h,
                                double growth) {
  if (!(h > 0.0) || !(growth >= 1.0) || !(core_hi > core_lo))
    throw Error(ErrorKind::InvalidArgument, "graded_axis needs h > 0, growth >= 1 and a nonempty core");
  const int n = std::max(1, int(std::ceil((core_hi - core_lo) / h)));
  const double start = 0.5 * (core_lo + core_hi) - 0.5 * n * h;
  const double stop = start + n * h;
  if (!(box_lo < start && stop < box_hi)) throw Error(ErrorKind::InvalidArgument, "grid core exceeds the box");
  std::vector<double> lo, x;
  double s = h, pos = start;
  for (;;) {
    s *= growth;
    if (pos - s <= box_lo + 0.5 * s) {
      lo.push_back(box_lo);
      break;
    }
    pos -= s;
    lo.push_back(pos);
  }
  x.assign(lo.rbegin(), lo.rend());
  for (int k = 0; k <= n; ++k) x.push_back(start + k * h);
  s = h;
  pos = stop;
  for (;;) {
    s *= growth;
    if (pos + s >= box_hi - 0.5 * s) {
      x.push_back(box_hi);
      break;
    }
    pos += s;
    x.push_back(pos);
  }
  return x;
}

GridProblem plate_problem(const std::function<double(Complex)>& dist0, const std::function<double(Complex)>& dist1,
                          Complex core_lo, Complex core_hi, Complex center, double box_half, int resolution) {
  const double h = 1.0 / resolution;
  std::vector<double> x = graded_axis(core_lo.real(), core_hi.real(), center.real() - box_half,
                                      center.real() + box_half, h);
  std::vector<double> y = graded_axis(core_lo.imag(), core_hi.imag(), center.imag() - box_half,
                                      center.imag() + box_half, h);
  const int nx = int(x.size()), ny = int(y.size());
  std::vector<std::uint8_t> fixed(size_t(nx) * ny, 0);
  std::vector<double> value(fixed.size(), 0.0);
  const double band = 0.5 * h * (1.0 + 1e-12);
  bool overlap = false;
#pragma omp parallel for reduction(|| : overlap)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Complex z(x[i], y[j]);
      const bool on0 = dist0(z) <= band, on1 = dist1(z) <= band;
      overlap = overlap || (on0 && on1);
      const size_t p = size_t(j) * nx + i;
      if (on0 || on1) {
        fixed[p] = 1;
        value[p] = on1 ? 1.0 : 0.0;
      }
    }
  }
  if (overlap) throw Error(ErrorKind::DegenerateGeometry, "plates touch at this grid resolution");
  return GridProblem(std::move(x), std::move(y), std::move(fixed), std::move(value));
}

namespace {

void check_spec(const GridSpec& gs) {
  if (!(gs.half_width >= 4.0)) throw Error(ErrorKind::InvalidArgument, "half_width must be at least 4 diameters");
  if (gs.resolution < 32) throw Error(ErrorKind::InvalidArgument, "resolution must be at least 32");
}

double point_segment(Complex p, Complex a, Complex b) {
  const Complex d = b - a;
  const double t = std::clamp(((p - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

}  // namespace

GridProblem slit_problem(const SlitConfig& cfg, const GridSpec& gs) {
  check_spec(gs);
  const auto pts = cfg.points();
  const double h = 1.0 / gs.resolution;
  if (std::abs(cfg.a2 - cfg.a1) <= h || std::abs(cfg.a4 - cfg.a3) <= h)
    throw Error(ErrorKind::DegenerateGeometry, "slit shorter than a grid cell");
  if (segment_distance(cfg.a1, cfg.a2, cfg.a3, cfg.a4) <= 2.0 * h)
    throw Error(ErrorKind::DegenerateGeometry, "slits closer than two grid cells");
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const Complex& p : pts) {
    xlo = std::min(xlo, p.real());
    xhi = std::max(xhi, p.real());
    ylo = std::min(ylo, p.imag());
    yhi = std::max(yhi, p.imag());
  }
  const double diam = cfg.diameter();
  const double margin = std::max(0.1 * diam, 8.0 * h);
  const Complex center(0.5 * (xlo + xhi), 0.5 * (ylo + yhi));
  return plate_problem([&](Complex z) { return point_segment(z, cfg.a3, cfg.a4); },
                       [&](Complex z) { return point_segment(z, cfg.a1, cfg.a2); }, Complex(xlo - margin, ylo - margin),
                       Complex(xhi + margin, yhi + margin), center, gs.half_width * diam, gs.resolution);
}

GridProblem annulus_problem(double q, const GridSpec& gs) {
  check_spec(gs);
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::InvalidArgument, "annulus needs 0 < q < 1");
  const double margin = std::max(0.05, 8.0 / gs.resolution);
  return plate_problem([q](Complex z) { return std::abs(std::abs(z) - q); },
                       [](Complex z) { return std::abs(std::abs(z) - 1.0); }, Complex(-1.0 - margin, -1.0 - margin),
                       Complex(1.0 + margin, 1.0 + margin), 0.0, gs.half_width * 2.0, gs.resolution);
}

double grid_capacity(const SlitConfig& cfg, const GridSpec& gs) { return grid_solve(slit_problem(cfg, gs)).capacity; }

double annulus_capacity(double q, const GridSpec& gs) { return grid_solve(annulus_problem(q, gs)).capacity; }

}  // namespace slitcap
