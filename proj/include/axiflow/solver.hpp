#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "axiflow/profile.hpp"
#include "axiflow/record.hpp"
#include "axiflow/speeds.hpp"

namespace axiflow {

/// Bookkeeping for parabolic rescalings (x, t) -> (L x, L^{1+alpha} t):
/// x_original = x_current / lambda_total + x_center, u likewise without shift.
struct ScaleLedger {
  double lambda_total = 1.0;
  double x_center = 0.0;
  int rescalings = 0;
};

/// Evolving curve in the current (rescaled) frame. Time is kept in original
/// units as t_base + t_local / lambda_total^{1+alpha}, where t_local restarts
/// at every rescaling.
struct FlowState {
  GeneratingCurve curve;
  ScaleLedger ledger;
  double t_base = 0.0;
  double t_local = 0.0;
  long steps = 0;

  double time(double alpha) const {
    return t_base + t_local / std::pow(ledger.lambda_total, 1.0 + alpha);
  }
  GeneratingCurve original_curve() const {
    GeneratingCurve c = scaled(curve, 1.0 / ledger.lambda_total);
    c.x.array() += ledger.x_center;
    return c;
  }
};

FlowState initial_state(const GeneratingCurve& curve, double t0 = 0.0);

struct StepControl {
  double cfl = 0.2;
  double max_dt = std::numeric_limits<double>::infinity();  ///< current frame
  int resample_every = 5;
  /// Turning-angle share of the node distribution (see resample).
  double angle_weight = 1.0;
  /// Continuation: rescale when the current-frame max curvature reaches the
  /// trigger; 0 disables.
  double rescale_trigger = 0.0;
  double rescale_target = 1.0;
  int checkpoint_every = 100;
  /// Keep the curve at every k-th checkpoint (0 = never); rescale and
  /// terminal checkpoints follow the same rule.
  int snapshot_every = 0;
  /// Relative tolerance for leaving the cone: lambda < -tol mu or
  /// lambda > (1 + tol) mu aborts with ConeExit.
  double cone_tol = 1e-4;
};

/// Throws BadParam unless 0 < cfl <= 1 and the counts are positive.
void validate(const StepControl& control);

struct StopConditions {
  double max_curvature = std::numeric_limits<double>::infinity();  ///< original frame
  std::optional<double> roundness_eps;  ///< stop once a/b - 1 and mu ratio - 1 fall below
  std::optional<double> t_end;
  long max_steps = 50'000'000;
};

void validate(const StopConditions& stop);

/// cfl * (min node spacing)^2 / max over nodes of (f^1 + (n-1) f^2), capped at max_dt.
double cfl_dt(const FlowState& state, const SpeedSpec& speed, const StepControl& control);

/// One explicit midpoint step of d(phi)/dt = -f nu with the given current-frame
/// dt, followed by resampling every `resample_every` steps. Throws ConeExit,
/// NumericalBlowup, DegenerateMesh.
FlowState step(const FlowState& state, const SpeedSpec& speed, const StepControl& control,
               double dt);
/// Same with dt = cfl_dt(state, speed, control).
FlowState step(const FlowState& state, const SpeedSpec& speed, const StepControl& control);

/// If the current-frame max curvature is at least `trigger_curvature`, blows
/// the curve up so that it becomes `target_curvature` and recentres it;
/// the ledger absorbs the change.
FlowState rescale_continuation(const FlowState& state, const SpeedSpec& speed,
                               double trigger_curvature,
                               double target_curvature);

/// Diagnostics of a state, in the original frame.
Checkpoint diagnose(const FlowState& state, const SpeedSpec& speed);

/// Steps until a stop condition fires. The initial curve must be convex and
/// axially stretched (BadParam otherwise).
RunRecord run(const GeneratingCurve& initial, const SpeedSpec& speed,
              const StepControl& control, const StopConditions& stop);
/// Continues from an arbitrary state (used for local re-simulation).
RunRecord run_from(const FlowState& state, const SpeedSpec& speed, const StepControl& control,
                   const StopConditions& stop);

struct RoundPointDetection {
  bool detected = false;
  double t_detect = 0;
  double t_singular_estimate = 0;
  double t_singular_previous = 0;  ///< same fit on the preceding window
};

/// Detected iff the run ended at the singularity (max_curvature or
/// roundness stop) and some checkpoint has a/b <= 1 + eps and
/// max mu / min mu <= 1 + eps. The singular time comes from a least-squares
/// fit of b^{1+alpha} linear in t over the last `window` checkpoints.
/// Throws InsufficientData with fewer than 3 checkpoints.
RoundPointDetection detect_round_point(const RunRecord& record, double eps, int window = 8);

}  // namespace axiflow
