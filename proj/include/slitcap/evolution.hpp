#pragma once

#include <array>
#include <vector>

#include "slitcap/error.hpp"
#include "slitcap/geometry.hpp"
#include "slitcap/state.hpp"

namespace slitcap {

struct StateDerivative {
  std::array<double, 4> dx{};
  double dm = 0.0;
  double dy0 = 0.0;
  Complex da{0.0, 0.0};
};

struct ConstraintDefects {
  double sum_defect = 0.0;
  double residue_defect = 0.0;
};

struct StepStat {
  double t = 0.0;  // start of the accepted step
  double h = 0.0;
  double error_norm = 0.0;
  int rejected = 0;  // rejections before this step was accepted
};

struct DefectRecord {
  double t = 0.0;
  ConstraintDefects defects;
};

struct Trajectory {
  std::vector<AccessoryState> samples;
  std::vector<StepStat> step_stats;
  std::vector<DefectRecord> defect_log;
  int defect_warnings = 0;

  const AccessoryState& final_state() const { return samples.back(); }
  double max_sum_defect() const;
  double max_residue_defect() const;
};

struct IntegrationOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double t_end = 1.0;
  double initial_step = 1e-2;
  double min_step = 1e-12;
  double warn_defect = 1e-7;
  double max_defect = 1e-5;
  int max_steps = 200000;
};

/// Integration failure that still carries the last accepted state.
class IntegrationError : public Error {
 public:
  IntegrationError(ErrorKind kind, const std::string& what, const AccessoryState& last_good)
      : Error(kind, what), last_good_(last_good) {}
  const AccessoryState& last_good() const { return last_good_; }

 private:
  AccessoryState last_good_;
};

/// gamma_k = Adot_k / D_k with c eliminated through d_{-1} = e^a; k is 1 or 2.
Complex gamma_k(const AccessoryState& s, const NormalizedConfig& ncfg, int k);

StateDerivative rhs(const AccessoryState& s, const NormalizedConfig& ncfg);

/// dm/dt = pi Re sum gamma_k for arbitrary endpoint velocities in the normalized frame.
double module_rate(const AccessoryState& s, double beta, const std::array<Complex, 4>& velocities);

/// Dormand-Prince 5(4) from s0.t to options.t_end.
Trajectory integrate(const AccessoryState& s0, const NormalizedConfig& ncfg, const IntegrationOptions& options);
Trajectory integrate(const AccessoryState& s0, const NormalizedConfig& ncfg, double rel_tol = 1e-9,
                     double abs_tol = 1e-11);

/// |sum x_k - beta/pi| and |gamma + sum zeta(z0 - z_k) - 2 zeta(2 z0)| on (1, 2mi).
ConstraintDefects constraint_defects(const AccessoryState& s, double beta);

/// Residue-identity expression itself (complex), used by tests and diagnostics.
Complex residue_identity(const AccessoryState& s, double beta);

}  // namespace slitcap
