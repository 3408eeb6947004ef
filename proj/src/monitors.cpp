#include "axiflow/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "axiflow/errors.hpp"
#include "axiflow/profile.hpp"
#include "axiflow/solver.hpp"

namespace axiflow {

namespace {

struct Worst {
  double margin = std::numeric_limits<double>::infinity();
  double time = 0;

  void update(double m, double t) {
    if (m < margin || std::isnan(m)) {
      margin = m;
      time = t;
    }
  }
};

CheckResult finish(const char* name, const Worst& w) {
  CheckResult r;
  r.name = name;
  r.worst_margin = w.margin;
  r.worst_time = w.time;
  r.pass = w.margin >= 0.0;
  return r;
}

CheckResult skipped(const char* name, std::string note) {
  CheckResult r;
  r.name = name;
  r.evaluated = false;
  r.note = std::move(note);
  return r;
}

// Radius of the sphere that becomes extinct at t_singular.
double anchored_radius(const SpeedSpec& speed, double t_singular, double t) {
  const double a = speed.alpha();
  return std::pow((1 + a) * std::pow(double(speed.n()), a) * (t_singular - t), 1.0 / (1 + a));
}

std::optional<double> singular_time(const RunRecord& r) {
  if (r.normalized) return 0.0;
  const bool singular = r.terminal_reason == "max_curvature" || r.terminal_reason == "roundness";
  if (!singular || r.checkpoints.size() < 3) return std::nullopt;
  return detect_round_point(r, 0.0).t_singular_estimate;
}

// First time the ratio falls to 2, linearly interpolated between checkpoints.
std::optional<double> eccentric_time(const RunRecord& r) {
  const auto& cs = r.checkpoints;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    if (cs[k].ratio > 2.0) continue;
    if (k == 0) return std::nullopt;
    const double w = (cs[k - 1].ratio - 2.0) / (cs[k - 1].ratio - cs[k].ratio);
    return cs[k - 1].t + w * (cs[k].t - cs[k - 1].t);
  }
  return std::nullopt;
}

}  // namespace

const CheckResult& AuditReport::check(std::string_view name) const {
  for (const CheckResult& c : checks)
    if (c.name == name) return c;
  throw std::out_of_range("no audit check named " + std::string(name));
}

AuditReport audit(const RunRecord& record, const SpeedSpec& speed, const AuditTolerances& tol) {
  if (record.checkpoints.size() < 2)
    throw InsufficientData("audit: need at least two checkpoints");
  record.validate();
  if (record.n != speed.n() || std::abs(record.alpha - speed.alpha()) > 1e-12)
    throw BadParam("audit: record and speed disagree on n or alpha");

  const auto& cs = record.checkpoints;
  const double alpha = speed.alpha();
  const int n = speed.n();
  AuditReport report;

  Worst a, b, f;
  for (const Checkpoint& c : cs) {
    a.update(c.min_mu_minus_lambda / c.max_mu + tol.cone, c.t);
    b.update(tol.pinching - c.z_margin, c.t);
  }
  report.checks.push_back(finish("axially_stretched", a));
  report.checks.push_back(finish("pinching", b));

  Worst mono;
  for (std::size_t k = 1; k < cs.size(); ++k)
    mono.update((cs[k].min_f - cs[k - 1].min_f) / cs[k - 1].min_f + tol.monotone, cs[k].t);
  report.checks.push_back(finish("min_speed_monotone", mono));

  const std::optional<double> ts = singular_time(record);
  if (ts) {
    Worst sw;
    for (const Checkpoint& c : cs) {
      if (!(c.t < *ts)) continue;
      const double r0 = anchored_radius(speed, *ts, c.t);
      sw.update(std::min(r0 / (0.5 * c.b) - 1.0, 2.0 * c.a / r0 - 1.0) + tol.sandwich, c.t);
    }
    report.checks.push_back(finish("sphere_sandwich", sw));
  } else {
    report.checks.push_back(skipped("sphere_sandwich", "run did not reach the singular time"));
  }

  Worst lower;
  for (std::size_t j = 1; j < cs.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double span = (1 + alpha) * (cs[j].t - cs[i].t);
      const double drop = std::max(cs[i].s_plus - cs[j].s_plus, cs[i].s_minus - cs[j].s_minus);
      lower.update((cs[j].max_f - drop / span) / cs[j].max_f + tol.speed_lower, cs[j].t);
    }
  }
  report.checks.push_back(finish("speed_lower_bound", lower));

  const std::vector<double> ones(std::size_t(n), 1.0);
  std::vector<double> face = ones;
  face[0] = 0.0;
  const double f_face = speed.value(face);
  const double f_umbilic = speed.value(ones);
  for (const Checkpoint& c : cs) {
    const double scale = std::pow(c.max_mu, alpha);
    const double lo = f_face * scale;
    const double hi = f_umbilic * scale;
    f.update(std::min((c.max_f - lo) / lo, (hi - c.max_f) / hi) + tol.comparability, c.t);
  }
  report.checks.push_back(finish("speed_comparability", f));

  // The halving bound lives in the normalized frame; map it to record time.
  double time_scale = 1.0;
  if (!record.normalized) {
    const std::optional<double> t2 = eccentric_time(record);
    if (ts && t2)
      time_scale = *ts - *t2;
    else if (ts)
      time_scale = *ts - cs.front().t;
    else
      time_scale = cs.back().t - cs.front().t;
  }
  const double window =
      halving_time_bound(speed, anchored_radius(speed, 0.0, -1.0)) * time_scale;
  Worst halving;
  std::size_t first = 0;
  for (std::size_t j = 1; j < cs.size(); ++j) {
    while (cs[j].t - cs[first].t >= window) ++first;
    for (std::size_t i = first; i < j; ++i)
      halving.update(2.0 * cs[j].ratio / cs[i].ratio - 1.0 + tol.halving, cs[j].t);
  }
  CheckResult g = finish("ratio_halving", halving);
  if (std::isinf(halving.margin)) g.note = "no checkpoint pair closer than the halving time";
  report.checks.push_back(std::move(g));

  report.pass = std::all_of(report.checks.begin(), report.checks.end(),
                            [](const CheckResult& c) { return c.pass; });
  return report;
}

double halving_time_bound(const SpeedSpec& speed, double radius) {
  if (!(radius >= 0.0)) throw BadParam("halving_time_bound: radius must be >= 0");
  if (radius == 0.0) return 0.0;
  return sphere_extinction_time(speed, radius / 16.0);
}

double halving_time_bound(const RunRecord& record, const SpeedSpec& speed) {
  if (!record.normalized) throw InsufficientData("halving_time_bound: record is not normalized");
  if (record.empty() || record.front().t > -1.0 || record.back().t < -1.0)
    throw InsufficientData("halving_time_bound: record does not cover t = -1");
  return halving_time_bound(speed, anchored_radius(speed, 0.0, -1.0));
}

nlohmann::json to_json(const AuditReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckResult& c : report.checks) {
    nlohmann::json j{{"name", c.name},
                     {"pass", c.pass},
                     {"evaluated", c.evaluated},
                     {"worst_time", c.worst_time}};
    // JSON has no infinity; a check without samples reports null.
    j["worst_margin"] = std::isfinite(c.worst_margin) ? nlohmann::json(c.worst_margin)
                                                      : nlohmann::json(nullptr);
    if (!c.note.empty()) j["note"] = c.note;
    checks.push_back(std::move(j));
  }
  return {{"pass", report.pass}, {"checks", std::move(checks)}};
}

}  // namespace axiflow
