#pragma once

#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "axiflow/record.hpp"
#include "axiflow/speeds.hpp"

namespace axiflow {

/// Relative tolerances of the audit checks.
struct AuditTolerances {
  double cone = 1e-3;           ///< (a) min(mu - lambda) >= -tol max mu
  double pinching = 1e-3;       ///< (b) Z / H^2 <= tol
  double monotone = 1e-3;       ///< (c) relative drop of min F
  double sandwich = 0.05;       ///< (d) relative, on radii
  double speed_lower = 1e-3;    ///< (e) relative to max F
  double comparability = 1e-3;  ///< (f) relative
  double halving = 0.0;         ///< (g) relative
};

struct CheckResult {
  std::string name;
  /// Tolerance-adjusted signed margin, negative means violated.
  double worst_margin = 0;
  double worst_time = 0;
  bool pass = true;
  /// False when the record cannot support the check (it then passes).
  bool evaluated = true;
  std::string note;
};

struct AuditReport {
  std::vector<CheckResult> checks;
  bool pass = true;

  /// Throws std::out_of_range for an unknown name.
  const CheckResult& check(std::string_view name) const;
};

/// Check names, in report order.
inline constexpr const char* kAuditChecks[] = {
    "axially_stretched", "pinching",           "min_speed_monotone", "sphere_sandwich",
    "speed_lower_bound", "speed_comparability", "ratio_halving"};

/// Runs all seven checks. The sandwich check needs a singular-time estimate:
/// 0 for normalized records, otherwise a fit over the last checkpoints when
/// the run ended at the singularity. Throws InsufficientData for records with
/// fewer than two checkpoints or non-increasing times, BadParam when speed and
/// record disagree on n or alpha.
AuditReport audit(const RunRecord& record, const SpeedSpec& speed,
                  const AuditTolerances& tolerances = {});

/// Extinction time of the sphere of radius `radius / 16`.
double halving_time_bound(const SpeedSpec& speed, double radius);

/// Same for the radius at t = -1 of the sphere that becomes extinct at t = 0.
/// Throws InsufficientData unless the record is normalized and covers t = -1.
double halving_time_bound(const RunRecord& record, const SpeedSpec& speed);

nlohmann::json to_json(const AuditReport& report);

}  // namespace axiflow
