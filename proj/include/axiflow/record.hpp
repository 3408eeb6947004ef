#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "axiflow/profile.hpp"

namespace axiflow {

/// Diagnostics of one checkpoint, all in the original (unrescaled) frame.
struct Checkpoint {
  double t = 0;
  long step = 0;
  std::string event = "step";  ///< start | step | rescale | crossing | terminal
  double a = 0;
  double b = 0;
  double ratio = 0;
  double center = 0;
  double min_lambda = 0, max_lambda = 0;
  double min_mu = 0, max_mu = 0;
  double mu_ratio = 0;             ///< max mu / min mu
  double min_mu_minus_lambda = 0;  ///< min over nodes of mu - lambda
  double max_h = 0;
  double min_f = 0, max_f = 0;
  double max_curvature = 0;  ///< max over nodes of max(lambda, mu)
  double z_margin = 0;       ///< max over nodes of Z_{1/(n(n-1))} / H^2
  double s_plus = 0;         ///< support in +axis direction, not recentred
  double s_minus = 0;        ///< support in -axis direction, not recentred
  double lambda_total = 1;   ///< accumulated rescaling factor at this point
  std::optional<GeneratingCurve> snapshot;  ///< original-frame curve, if dumped
};

struct RunRecord {
  std::vector<Checkpoint> checkpoints;
  std::string terminal_reason;  ///< max_curvature | roundness | t_end | max_steps
  std::string speed_id;
  int n = 2;
  double alpha = 1;
  int nodes = 0;
  /// Times run over [-T, 0) with the ratio a/b = 2 at t = -1.
  bool normalized = false;

  bool empty() const { return checkpoints.empty(); }
  const Checkpoint& front() const { return checkpoints.front(); }
  const Checkpoint& back() const { return checkpoints.back(); }
  /// Throws InsufficientData if empty or times are not strictly increasing.
  void validate() const;
  /// Original-frame curve at time t by linear interpolation between the
  /// bracketing snapshots (nodes matched by index). Throws InsufficientData.
  GeneratingCurve curve_at(double t) const;
  /// Whether snapshots bracket t.
  bool covers(double t) const;
};

/// JSON Lines: a header object, one object per checkpoint, a terminal object.
/// Snapshot geometry is not part of the stream (see write_snapshots).
void write_jsonl(std::ostream& os, const RunRecord& record);
RunRecord read_jsonl(std::istream& is);

/// Writes every snapshot as `<dir>/snapshot_<index>.csv`; returns the count.
int write_snapshots(const std::string& dir, const RunRecord& record);
/// Attaches snapshot CSVs found in `dir` to the matching checkpoints.
int read_snapshots(const std::string& dir, RunRecord& record);

}  // namespace axiflow
