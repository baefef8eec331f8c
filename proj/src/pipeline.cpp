#include "slitcap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <omp.h>

#include "slitcap/evolution.hpp"
#include "slitcap/map.hpp"
#include "slitcap/symmetric.hpp"

namespace slitcap {

namespace {

const Complex I{0.0, 1.0};
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string strip_kind(const Error& e) {
  const std::string w = e.what();
  const size_t n = to_string(e.kind()).size() + 2;
  return w.size() >= n ? w.substr(n) : w;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
auto staged(Stage stage, F f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

Report run(const SlitConfig& cfg, const SolveOptions& opt, NormalizedConfig* nout) {
  const auto t0 = std::chrono::steady_clock::now();
  const NormalizedConfig n = staged(Stage::Geometry, [&] { return normalize(cfg); });
  const AccessoryState s0 = staged(Stage::Initialization, [&] { return initial_state(n).to_state(); });
  const Trajectory tr = staged(Stage::Evolution, [&] { return integrate(s0, n, opt.rel_tol, opt.abs_tol); });

  Report r;
  r.config = cfg;
  r.case_tag = n.case_tag;
  r.beta = n.beta;
  r.state = tr.final_state();
  r.module = r.state.m;
  r.capacity = 1.0 / r.state.m;
  r.defect_sum = tr.max_sum_defect();
  r.defect_residue = tr.max_residue_defect();
  r.defect_warnings = tr.defect_warnings;
  r.accepted_steps = tr.step_stats.size();
  for (const StepStat& st : tr.step_stats) r.rejected_steps += size_t(st.rejected);

  if (opt.trace) {
    staged(Stage::Reconstruction, [&] {
      const MapData md = make_map(r.state, n);
      const BoundaryTrace bt = boundary_trace(md, cfg, opt.trace_samples);
      const double diam = cfg.diameter();
      for (int k = 0; k < 4; ++k) r.endpoint_errors[k] = bt.endpoint_errors[k] / diam;
      r.line_deviation = bt.max_line_deviation / diam;
      return 0;
    });
    r.traced = true;
  }
  if (nout) *nout = n;
  r.runtime_ms = elapsed_ms(t0);
  return r;
}

int sign_of(double v) { return std::abs(v) < kSignFloor ? 0 : (v > 0.0 ? 1 : -1); }

}  // namespace

const char* to_string(Stage s) {
  switch (s) {
    case Stage::Geometry: return "geometry";
    case Stage::Initialization: return "initialization";
    case Stage::Evolution: return "evolution";
    case Stage::Reconstruction: return "reconstruction";
  }
  return "unknown";
}

StageError::StageError(Stage stage, const Error& cause)
    : Error(cause.kind(), std::string(to_string(stage)) + " stage: " + strip_kind(cause)), stage_(stage) {}

Report compute(const SlitConfig& cfg, const SolveOptions& opt) { return run(cfg, opt, nullptr); }

SlitConfig sweep_config(const SweepSpec& spec, double a) {
  const Complex d = spec.direction / std::abs(spec.direction);
  return {spec.origin + (a - 0.5 * spec.length) * d, spec.origin + (a + 0.5 * spec.length) * d, spec.a3, spec.a4};
}

SweepResult sweep(const SweepSpec& spec, const SolveOptions& opt) {
  if (spec.steps < 2) throw Error(ErrorKind::InvalidArgument, "a sweep needs at least 2 points");
  if (!(spec.to > spec.from)) throw Error(ErrorKind::InvalidArgument, "sweep range must be increasing");
  if (!(spec.length > 0.0) || std::abs(spec.direction) == 0.0)
    throw Error(ErrorKind::InvalidArgument, "sweep needs a positive length and a nonzero direction");

  SweepResult res;
  const int n = spec.steps;
  res.points.resize(n);
  SolveOptions o = opt;
  o.trace = false;
  const Complex d = spec.direction / std::abs(spec.direction);
  const int workers = spec.workers > 0 ? spec.workers : omp_get_max_threads();

  // rows are written by index, so the output order does not depend on completion order
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers != 1)
  for (int i = 0; i < n; ++i) {
    SweepPoint& p = res.points[i];
    p.a = spec.from + (spec.to - spec.from) * i / (n - 1);
    const SlitConfig cfg = sweep_config(spec, p.a);
    try {
      NormalizedConfig nc;
      const Report r = run(cfg, o, &nc);
      p.ok = true;
      p.module = r.module;
      p.capacity = r.capacity;
      p.defect_sum = r.defect_sum;
      p.defect_residue = r.defect_residue;
      const Complex lin = nc.frame.to_normalized(cfg.a1 + d) - nc.frame.to_normalized(cfg.a1);
      if (nc.renumbering.source[0] < 2) {
        p.indicator = module_rate(r.state, nc.beta, {lin, lin, 0.0, 0.0}) / kPi;
      } else if (nc.case_tag == SlitCase::Parallel) {
        // the sliding slit became A3A4; move A1A2 the opposite way instead
        p.indicator = module_rate(r.state, nc.beta, {-lin, -lin, 0.0, 0.0}) / kPi;
      } else {
        p.indicator = kNaN;
      }
    } catch (const StageError& e) {
      p.ok = false;
      p.error = e.what();
      p.exit_class = e.stage() == Stage::Geometry ? 2 : 3;
    } catch (const Error& e) {
      p.ok = false;
      p.error = e.what();
      p.exit_class = 3;
    }
  }

  for (int i = 0; i < n; ++i) {
    SweepPoint& p = res.points[i];
    p.slope = kNaN;
    if (i > 0 && i + 1 < n && p.ok && res.points[i - 1].ok && res.points[i + 1].ok)
      p.slope = (res.points[i + 1].module - res.points[i - 1].module) / (res.points[i + 1].a - res.points[i - 1].a);
  }

  // extrema: sign changes of the centered differences, located at the extreme m in between
  int last_sign = 0;
  int last_idx = -1;
  for (int i = 0; i < n; ++i) {
    const SweepPoint& p = res.points[i];
    if (std::isnan(p.slope)) {
      last_sign = 0;
      continue;
    }
    const int s = sign_of(p.slope);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) {
      int best = last_idx;
      for (int k = last_idx; k <= i; ++k) {
        const bool better = last_sign < 0 ? res.points[k].module < res.points[best].module
                                          : res.points[k].module > res.points[best].module;
        if (better) best = k;
      }
      (last_sign < 0 ? res.minima : res.maxima).push_back(size_t(best));
    }
    last_sign = s;
    last_idx = i;
  }

  for (const SweepPoint& p : res.points) {
    if (std::isnan(p.slope) || std::isnan(p.indicator)) continue;
    ++res.sign_checked;
    if (sign_of(p.slope) != sign_of(p.indicator)) ++res.sign_mismatches;
  }
  return res;
}

const std::vector<SlitConfig>& table2_configs() {
  static const std::vector<SlitConfig> rows = {
      {I, 2.0 + I, -2.0 - I, -1.0 - I},        {I, 2.0 + I, -2.0 - 2.0 * I, -1.0 - 2.0 * I},
      {I, 2.0 + I, 3.0 - 2.0 * I, 4.0 - 3.0 * I}, {I, 2.0 + 2.0 * I, -2.0 - I, -1.0 - I},
      {I, 2.0 + 2.0 * I, -2.0 - 2.0 * I, -1.0 - 2.0 * I}, {I, 2.0 + 2.0 * I, 3.0 - 2.0 * I, 4.0 - 3.0 * I},
      {I, 3.0 + 2.0 * I, -2.0 - I, -1.0 - I},  {I, 3.0 + 2.0 * I, -2.0 - 2.0 * I, -1.0 - 2.0 * I},
      {I, 3.0 + 2.0 * I, 3.0 - 2.0 * I, 4.0 - 3.0 * I}, {I, 3.0 * I, 3.0, 4.0},
      {I, 3.0 * I, 0.0, 2.0},                   {I, 3.0 * I, -3.0, 2.0},
      {I, 3.0 + I, -I, 3.0 - I},                {I, 3.0 + 2.0 * I, -I, 3.0 - 2.0 * I},
      {I, 3.0 + 3.0 * I, -I, 3.0 - 3.0 * I},
  };
  return rows;
}

const std::vector<double>& table2_capacities() {
  static const std::vector<double> v = {1.44058466, 1.30971558, 1.35832035, 1.42710109, 1.29776864,
                                        1.32814214, 1.49363842, 1.36333122, 1.45844055, 1.29126199,
                                        2.18251913, 2.82846257, 2.69941565, 2.23470313, 2.11547784};
  return v;
}

const std::vector<double>& table1_moduli() {
  static const std::vector<double> v = {0.56247, 0.62207, 0.72955, 0.82469, 0.90239, 0.96656, 1.02073, 1.06743};
  return v;
}

const std::vector<double>& table1_capacities() {
  static const std::vector<double> v = {1.77787, 1.60753, 1.37070, 1.21258, 1.10817, 1.03459, 0.97968, 0.93682};
  return v;
}

SlitConfig table1_config(double a) { return {-I, -2.0 * I, a - 0.5, a + 0.5}; }

TablesResult reproduce_tables(const SolveOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveOptions o = opt;
  o.trace = false;
  const auto& t2 = table2_configs();
  const int n1 = int(table1_moduli().size()), n2 = int(t2.size());

  struct Job {
    SlitConfig cfg;
    double value = 0.0;  // module
    std::string error;
  };
  std::vector<Job> jobs(n1 + n2);
  for (int a = 0; a < n1; ++a) jobs[a].cfg = table1_config(a);
  for (int k = 0; k < n2; ++k) jobs[n1 + k].cfg = t2[k];

#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < n1 + n2; ++j) {
    try {
      jobs[j].value = compute(jobs[j].cfg, o).module;
    } catch (const Error& e) {
      jobs[j].error = e.what();
    }
  }

  TablesResult res;
  auto row = [](std::string label, const Job& job, double ref, double computed, double tol) {
    TableRow r;
    r.label = std::move(label);
    r.config = job.cfg;
    r.reference = ref;
    r.tolerance = tol;
    r.error = job.error;
    if (job.error.empty()) {
      r.computed = computed;
      r.delta = std::abs(computed - ref);
      r.ok = r.delta <= tol;
    }
    return r;
  };
  for (int a = 0; a < n1; ++a) {
    const Job& j = jobs[a];
    res.table1_module.push_back(row("a=" + std::to_string(a), j, table1_moduli()[a], j.value, 1e-4));
    res.table1_capacity.push_back(row("a=" + std::to_string(a), j, table1_capacities()[a], 1.0 / j.value, 2e-4));
  }
  for (int k = 0; k < n2; ++k) {
    const Job& j = jobs[n1 + k];
    res.table2.push_back(row("row " + std::to_string(k + 1), j, table2_capacities()[k], 1.0 / j.value, 5e-5));
  }
  res.pass = true;
  for (const auto* t : {&res.table1_module, &res.table1_capacity, &res.table2})
    for (const TableRow& r : *t) res.pass = res.pass && r.ok;
  res.runtime_ms = elapsed_ms(t0);
  return res;
}

}  // namespace slitcap
