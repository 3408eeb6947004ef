#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "axiflow/monitors.hpp"
#include "axiflow/record.hpp"
#include "axiflow/solver.hpp"
#include "axiflow/speeds.hpp"

namespace axiflow {

/// A run rescaled so that a/b = 2 at t = -1 and the singular time is t = 0.
struct NormalizedRun {
  double l = 0;        ///< half-length of the seed cylinder, if known
  RunRecord record;    ///< normalized frame, times in [-T_l, 0)
  double T_l = 0;      ///< backward existence time
  double Lambda = 1;   ///< spatial scale factor
  double t_singular = 0;  ///< singular time in the raw frame
  double t_crossing = 0;  ///< raw time with a/b = 2
  double center = 0;      ///< raw axial centre at the crossing
};

struct NormalizeOptions {
  double tol = 1e-2;        ///< accepted |a/b - 2| at t = -1
  double round_eps = 0.05;  ///< round-point detection threshold
  /// Controls for re-simulating the bracketing interval.
  StepControl control;
  int max_refinements = 60;
};

/// Throws NoEccentricTime if a/b never comes down through 2, NotRound if no
/// round point is detected or the singular time estimate precedes the
/// crossing.
NormalizedRun normalize_run(const RunRecord& raw, const SpeedSpec& speed,
                            const NormalizeOptions& options = {});

struct FamilyOptions {
  int N = 128;
  StepControl control;
  StopConditions stop;
  AuditTolerances tolerances;
  NormalizeOptions normalize;
  int jobs = 1;
  double window_lo = -2.0;
  double window_hi = -1.0;
  double convergence_time = -1.0;
  std::vector<double> blowdown_scales{1.0, 2.0, 4.0};
  double t_probe = -1.0;
};

struct FamilyMember {
  double l = 0;
  std::optional<NormalizedRun> run;
  std::optional<AuditReport> audit;
  std::string terminal_reason;
  std::string error;  ///< empty on success

  bool ok() const { return run.has_value() && audit && audit->pass; }
};

struct ConvergenceEntry {
  double l1 = 0, l2 = 0, t = 0, distance = 0;
};

struct WindowBounds {
  double l = 0;
  bool covered = false;  ///< checkpoints reach back to window_lo
  double min_b = 0;
  double max_a = 0;
  double min_ratio = 0;
};

struct BoundsTable {
  double window_lo = 0, window_hi = 0;
  std::vector<WindowBounds> members;
  double b_K = 0;
  double A_K = 0;
  double A_spread = 0;  ///< (max - min) / min over members of max a
};

struct BlowdownSample {
  double S = 0;
  double time = 0;  ///< S^{1+alpha} t_probe
  double mid_radius = 0;
  double cylinder_radius_ref = 0;
  double lambda_mid = 0;
  double mismatch = 0;  ///< |mid_radius - ref| / ref
};

struct OvaloidFamily {
  std::vector<FamilyMember> members;
  std::vector<ConvergenceEntry> convergence;
  BoundsTable bounds;
  std::vector<BlowdownSample> blowdown;
  std::string blowdown_error;
  bool degraded = false;
};

/// Seeds spherocylinder(l, 1) for every l, runs, audits and normalizes the
/// members on up to `jobs` threads, then assembles the tables. Member errors
/// are recorded, not thrown. Throws BadParam unless l_list is increasing with
/// every l >= 1.
OvaloidFamily build_family(const std::vector<double>& l_list, const SpeedSpec& speed,
                           const FamilyOptions& options = {});

/// Symmetric Hausdorff distance between the recentred meridian curves at
/// time t (vertices and edge midpoints against the other polyline).
/// Throws InsufficientData when snapshots do not bracket t.
double profile_distance(const NormalizedRun& r1, const NormalizedRun& r2, double t);
double profile_distance(const GeneratingCurve& c1, const GeneratingCurve& c2);

/// Equator radius and axial curvature of S^{-1} phi(S^{1+alpha} t_probe)
/// against the cylinder that becomes extinct at t = 0. Throws
/// InsufficientData when the run does not cover a probe time.
std::vector<BlowdownSample> blowdown(const NormalizedRun& run, const SpeedSpec& speed,
                                     const std::vector<double>& S_list, double t_probe);

nlohmann::json to_json(const OvaloidFamily& family);
/// ratio_vs_t.csv, profiles.csv (t = convergence time) and blowdown.csv.
void write_family_plots(const std::string& dir, const OvaloidFamily& family, double t_profile);

}  // namespace axiflow
