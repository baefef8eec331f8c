#pragma once

#include <array>
#include <string>
#include <vector>

#include "slitcap/error.hpp"
#include "slitcap/geometry.hpp"
#include "slitcap/state.hpp"

namespace slitcap {

enum class Stage { Geometry, Initialization, Evolution, Reconstruction };
const char* to_string(Stage s);

/// An upstream error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(Stage stage, const Error& cause);
  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

struct SolveOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  bool trace = true;  // reconstruct the map and trace the boundary
  int trace_samples = 256;
};

struct Report {
  SlitConfig config;
  SlitCase case_tag = SlitCase::Generic;
  double beta = 0.0;
  double module = 0.0;
  double capacity = 0.0;  // 1 / module
  AccessoryState state;
  double defect_sum = 0.0;  // maxima along the trajectory
  double defect_residue = 0.0;
  int defect_warnings = 0;
  size_t accepted_steps = 0;
  size_t rejected_steps = 0;
  bool traced = false;
  std::array<double, 4> endpoint_errors{};  // relative to the diameter, input label order
  double line_deviation = 0.0;              // relative to the diameter
  double runtime_ms = 0.0;
};

/// geometry -> symmetric start -> evolution -> reconstruction.
Report compute(const SlitConfig& cfg, const SolveOptions& opt = {});

/// A fixed slit A3A4 and a slit of the given length sliding on the line origin + s * direction:
/// A1A2 = origin + [a - length/2, a + length/2] * direction.
struct SweepSpec {
  Complex a3{0.0, 0.0};
  Complex a4{1.0, 0.0};
  Complex origin{0.0, 0.0};
  Complex direction{1.0, 0.0};
  double length = 1.0;
  double from = 0.0;
  double to = 1.0;
  int steps = 2;  // number of grid points, from and to included
  int workers = 0;  // 0: OpenMP default
};

struct SweepPoint {
  double a = 0.0;
  bool ok = false;
  std::string error;
  int exit_class = 0;  // 2 geometry, 3 solver
  double module = 0.0;
  double capacity = 0.0;
  double defect_sum = 0.0;
  double defect_residue = 0.0;
  double indicator = 0.0;  // Re(gamma1 + gamma2) for a unit slide, NaN if unavailable
  double slope = 0.0;      // centered difference of m, NaN at the ends or next to failures
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<size_t> minima, maxima;
  int sign_checked = 0;
  int sign_mismatches = 0;
};

SlitConfig sweep_config(const SweepSpec& spec, double a);
SweepResult sweep(const SweepSpec& spec, const SolveOptions& opt = {});

/// Slopes and indicators below this are treated as zero when signs are compared.
inline constexpr double kSignFloor = 1e-6;

struct TableRow {
  std::string label;
  SlitConfig config;
  double reference = 0.0;
  double computed = 0.0;
  double delta = 0.0;
  double tolerance = 0.0;
  bool ok = false;
  std::string error;
};

struct TablesResult {
  std::vector<TableRow> table1_module, table1_capacity, table2;
  bool pass = false;
  double runtime_ms = 0.0;
};

/// Reference configurations and values.
const std::vector<SlitConfig>& table2_configs();
const std::vector<double>& table2_capacities();
const std::vector<double>& table1_moduli();
const std::vector<double>& table1_capacities();
SlitConfig table1_config(double a);

TablesResult reproduce_tables(const SolveOptions& opt = {});

}  // namespace slitcap
