#include "axiflow/ovaloid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "axiflow/errors.hpp"
#include "axiflow/profile.hpp"

namespace axiflow {

namespace {

using Vec2 = Eigen::Vector2d;

// Re-simulates from a snapshot checkpoint up to time t and returns the
// terminal checkpoint (with snapshot).
Checkpoint resimulate(const Checkpoint& from, const SpeedSpec& speed, const StepControl& base,
                      double t) {
  const GeneratingCurve& snap = *from.snapshot;
  const double center = 0.5 * (snap.x(0) + snap.x(snap.segments()));
  FlowState state;
  state.curve = scaled(snap, from.lambda_total, center);
  state.ledger.lambda_total = from.lambda_total;
  state.ledger.x_center = center;
  state.t_base = from.t;
  state.steps = from.step;

  StepControl control = base;
  control.checkpoint_every = std::numeric_limits<int>::max();
  control.snapshot_every = 1;
  control.rescale_trigger = 0.0;
  StopConditions stop;
  stop.t_end = t;
  RunRecord r = run_from(state, speed, control, stop);
  return r.back();
}

Checkpoint transformed(const Checkpoint& c, double Lambda, double alpha, double ts, double c2) {
  const double time_scale = std::pow(Lambda, 1 + alpha);
  const double speed_scale = std::pow(Lambda, alpha);
  Checkpoint out = c;
  out.t = time_scale * (c.t - ts);
  out.a *= Lambda;
  out.b *= Lambda;
  out.center = Lambda * (c.center - c2);
  out.min_lambda /= Lambda;
  out.max_lambda /= Lambda;
  out.min_mu /= Lambda;
  out.max_mu /= Lambda;
  out.min_mu_minus_lambda /= Lambda;
  out.max_h /= Lambda;
  out.max_curvature /= Lambda;
  out.min_f /= speed_scale;
  out.max_f /= speed_scale;
  out.s_plus = Lambda * (c.s_plus - c2);
  out.s_minus = Lambda * (c.s_minus + c2);
  out.lambda_total /= Lambda;
  if (c.snapshot) out.snapshot = scaled(*c.snapshot, Lambda, c2);
  return out;
}

}  // namespace

NormalizedRun normalize_run(const RunRecord& raw, const SpeedSpec& speed,
                            const NormalizeOptions& options) {
  raw.validate();
  if (!(options.tol > 0.0)) throw BadParam("normalize_run: tol must be positive");
  const auto& cs = raw.checkpoints;
  const double alpha = raw.alpha;
  const double close = 0.1 * options.tol;

  std::size_t k = 0;
  while (k < cs.size() && cs[k].ratio > 2.0 + close) ++k;
  if (k == cs.size() || k == 0)
    throw NoEccentricTime("normalize_run: a/b never comes down through 2");

  const RoundPointDetection d = detect_round_point(raw, options.round_eps);
  if (!d.detected) throw NotRound("normalize_run: no round point detected");

  Checkpoint crossing;
  std::size_t after = k;  // first raw checkpoint past the crossing
  if (std::abs(cs[k].ratio - 2.0) <= close) {
    crossing = cs[k];
    after = k + 1;
  } else {
    std::size_t j = k;
    while (j > 0 && !cs[j - 1].snapshot) --j;
    if (j == 0) {
      // No curve to restart from: interpolate the scalars.
      const Checkpoint& lo = cs[k - 1];
      const Checkpoint& hi = cs[k];
      const double w = (lo.ratio - 2.0) / (lo.ratio - hi.ratio);
      crossing = lo;
      crossing.t = lo.t + w * (hi.t - lo.t);
      crossing.a = lo.a + w * (hi.a - lo.a);
      crossing.b = lo.b + w * (hi.b - lo.b);
      crossing.ratio = crossing.a / crossing.b;
      crossing.center = lo.center + w * (hi.center - lo.center);
      crossing.snapshot.reset();
    } else {
      const Checkpoint& from = cs[j - 1];
      // Regula falsi (Illinois) on ratio - 2 over [t_{k-1}, t_k].
      double t_lo = cs[k - 1].t, f_lo = cs[k - 1].ratio - 2.0;
      double t_hi = cs[k].t, f_hi = cs[k].ratio - 2.0;
      int side = 0;
      bool found = false;
      for (int it = 0; it < options.max_refinements; ++it) {
        const double t = (t_lo * f_hi - t_hi * f_lo) / (f_hi - f_lo);
        crossing = resimulate(from, speed, options.control, t);
        const double fm = crossing.ratio - 2.0;
        if (std::abs(fm) <= close) {
          found = true;
          break;
        }
        if (fm > 0) {
          t_lo = t;
          f_lo = fm;
          if (side == 1) f_hi *= 0.5;
          side = 1;
        } else {
          t_hi = t;
          f_hi = fm;
          if (side == -1) f_lo *= 0.5;
          side = -1;
        }
      }
      if (!found) throw NoEccentricTime("normalize_run: crossing refinement did not converge");
    }
  }
  crossing.event = "crossing";

  const double ts = d.t_singular_estimate;
  const double t2 = crossing.t;
  if (!(ts > t2)) throw NotRound("normalize_run: singular time estimate precedes the crossing");
  const double Lambda = std::pow(ts - t2, -1.0 / (1 + alpha));
  const double c2 = crossing.center;

  NormalizedRun out;
  out.Lambda = Lambda;
  out.t_singular = ts;
  out.t_crossing = t2;
  out.center = c2;
  out.record.speed_id = raw.speed_id;
  out.record.n = raw.n;
  out.record.alpha = alpha;
  out.record.nodes = raw.nodes;
  out.record.terminal_reason = raw.terminal_reason;
  out.record.normalized = true;
  for (std::size_t i = 0; i < k; ++i)
    out.record.checkpoints.push_back(transformed(cs[i], Lambda, alpha, ts, c2));
  out.record.checkpoints.push_back(transformed(crossing, Lambda, alpha, ts, c2));
  out.record.checkpoints.back().t = -1.0;
  for (std::size_t i = after; i < cs.size(); ++i)
    if (cs[i].t > t2) out.record.checkpoints.push_back(transformed(cs[i], Lambda, alpha, ts, c2));
  out.T_l = -out.record.front().t;
  return out;
}

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * d)).norm();
}

double point_polyline_distance(const Vec2& p, const GeneratingCurve& c) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < c.segments(); ++i)
    best = std::min(best, point_segment_distance(p, c.node(i), c.node(i + 1)));
  return best;
}

double directed_hausdorff(const GeneratingCurve& from, const GeneratingCurve& to) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < from.nodes(); ++i) {
    worst = std::max(worst, point_polyline_distance(from.node(i), to));
    if (i + 1 < from.nodes())
      worst = std::max(worst,
                       point_polyline_distance(0.5 * (from.node(i) + from.node(i + 1)), to));
  }
  return worst;
}

GeneratingCurve recentred(const GeneratingCurve& c) {
  return scaled(c, 1.0, 0.5 * (c.x(0) + c.x(c.segments())));
}

// Equator of a recentred curve: radius and axial curvature at x = 0.
std::pair<double, double> equator(const GeneratingCurve& c) {
  const CurveGeometry g = geometry(c);
  for (Eigen::Index i = 0; i < c.segments(); ++i) {
    if (c.x(i) <= 0.0 && c.x(i + 1) >= 0.0) {
      const double w = c.x(i + 1) > c.x(i) ? -c.x(i) / (c.x(i + 1) - c.x(i)) : 0.0;
      return {(1 - w) * c.u(i) + w * c.u(i + 1), (1 - w) * g.lambda(i) + w * g.lambda(i + 1)};
    }
  }
  throw InsufficientData("equator: curve does not straddle its centre");
}

}  // namespace

double profile_distance(const GeneratingCurve& c1, const GeneratingCurve& c2) {
  const GeneratingCurve a = recentred(c1);
  const GeneratingCurve b = recentred(c2);
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double profile_distance(const NormalizedRun& r1, const NormalizedRun& r2, double t) {
  return profile_distance(r1.record.curve_at(t), r2.record.curve_at(t));
}

std::vector<BlowdownSample> blowdown(const NormalizedRun& run, const SpeedSpec& speed,
                                     const std::vector<double>& S_list, double t_probe) {
  if (!(t_probe < 0.0)) throw BadParam("blowdown: t_probe must be negative");
  const double alpha = speed.alpha();
  const double ref =
      std::pow(-t_probe / cylinder_extinction_time(speed, 1.0), 1.0 / (1 + alpha));
  std::vector<BlowdownSample> out;
  for (double S : S_list) {
    if (!(S > 0.0)) throw BadParam("blowdown: scales must be positive");
    BlowdownSample b;
    b.S = S;
    b.time = std::pow(S, 1 + alpha) * t_probe;
    if (!run.record.covers(b.time)) {
      std::ostringstream os;
      os << "blowdown: run does not reach back to t = " << b.time;
      throw InsufficientData(os.str());
    }
    const auto [radius, lambda] = equator(scaled(recentred(run.record.curve_at(b.time)), 1.0 / S));
    b.mid_radius = radius;
    b.lambda_mid = lambda;
    b.cylinder_radius_ref = ref;
    b.mismatch = std::abs(radius - ref) / ref;
    out.push_back(b);
  }
  return out;
}

OvaloidFamily build_family(const std::vector<double>& l_list, const SpeedSpec& speed,
                           const FamilyOptions& options) {
  if (l_list.empty()) throw BadParam("build_family: empty length list");
  for (std::size_t i = 0; i < l_list.size(); ++i) {
    if (!(l_list[i] >= 1.0)) throw BadParam("build_family: every l must be >= 1");
    if (i > 0 && !(l_list[i] > l_list[i - 1]))
      throw BadParam("build_family: lengths must be increasing");
  }
  if (options.jobs < 1) throw BadParam("build_family: jobs must be >= 1");
  validate(options.control);
  validate(options.stop);

  OvaloidFamily family;
  family.members.resize(l_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < l_list.size(); i = next++) {
      FamilyMember& m = family.members[i];
      m.l = l_list[i];
      try {
        const GeneratingCurve seed =
            make_spherocylinder(m.l, 1.0, options.N, speed.n(), options.control.angle_weight);
        const RunRecord raw = run(seed, speed, options.control, options.stop);
        m.terminal_reason = raw.terminal_reason;
        m.audit = audit(raw, speed, options.tolerances);
        NormalizeOptions norm = options.normalize;
        norm.control = options.control;
        m.run = normalize_run(raw, speed, norm);
        m.run->l = m.l;
      } catch (const std::exception& e) {
        m.error = e.what();
      }
    }
  };
  const int threads = std::min<int>(options.jobs, int(l_list.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  family.degraded = std::any_of(family.members.begin(), family.members.end(),
                                [](const FamilyMember& m) { return !m.ok(); });

  std::vector<const FamilyMember*> done;
  for (const FamilyMember& m : family.members)
    if (m.run) done.push_back(&m);

  for (std::size_t i = 1; i < done.size(); ++i) {
    ConvergenceEntry e{done[i - 1]->l, done[i]->l, options.convergence_time, 0.0};
    try {
      e.distance = profile_distance(*done[i - 1]->run, *done[i]->run, options.convergence_time);
    } catch (const InsufficientData&) {
      e.distance = std::numeric_limits<double>::quiet_NaN();
    }
    family.convergence.push_back(e);
  }

  BoundsTable& bt = family.bounds;
  bt.window_lo = options.window_lo;
  bt.window_hi = options.window_hi;
  bt.b_K = std::numeric_limits<double>::infinity();
  double a_min = std::numeric_limits<double>::infinity(), a_max = 0.0;
  for (const FamilyMember* m : done) {
    WindowBounds w;
    w.l = m->l;
    w.covered = m->run->record.front().t <= options.window_lo;
    w.min_b = std::numeric_limits<double>::infinity();
    w.min_ratio = std::numeric_limits<double>::infinity();
    for (const Checkpoint& c : m->run->record.checkpoints) {
      if (c.t < options.window_lo || c.t > options.window_hi) continue;
      w.min_b = std::min(w.min_b, c.b);
      w.max_a = std::max(w.max_a, c.a);
      w.min_ratio = std::min(w.min_ratio, c.ratio);
    }
    bt.members.push_back(w);
    bt.b_K = std::min(bt.b_K, w.min_b);
    bt.A_K = std::max(bt.A_K, w.max_a);
    a_min = std::min(a_min, w.max_a);
    a_max = std::max(a_max, w.max_a);
  }
  bt.A_spread = done.empty() ? 0.0 : (a_max - a_min) / a_min;

  if (!done.empty() && !options.blowdown_scales.empty()) {
    try {
      family.blowdown = blowdown(*done.back()->run, speed, options.blowdown_scales,
                                 options.t_probe);
    } catch (const std::exception& e) {
      family.blowdown_error = e.what();
    }
  }
  return family;
}

namespace {

nlohmann::json number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const OvaloidFamily& family) {
  nlohmann::json members = nlohmann::json::array();
  for (const FamilyMember& m : family.members) {
    nlohmann::json j{{"l", m.l},
                     {"terminal_reason", m.terminal_reason},
                     {"audit_pass", m.audit ? m.audit->pass : false}};
    if (m.run) {
      j["T_l"] = m.run->T_l;
      j["Lambda"] = m.run->Lambda;
      j["t_singular"] = m.run->t_singular;
      j["t_crossing"] = m.run->t_crossing;
    }
    if (m.audit) j["audit"] = to_json(*m.audit);
    if (!m.error.empty()) j["error"] = m.error;
    members.push_back(std::move(j));
  }
  nlohmann::json convergence = nlohmann::json::array();
  for (const ConvergenceEntry& e : family.convergence)
    convergence.push_back({{"l1", e.l1}, {"l2", e.l2}, {"t", e.t}, {"distance", number(e.distance)}});
  nlohmann::json bounds{{"window", {family.bounds.window_lo, family.bounds.window_hi}},
                        {"b_K", number(family.bounds.b_K)},
                        {"A_K", number(family.bounds.A_K)},
                        {"A_spread", number(family.bounds.A_spread)}};
  nlohmann::json per = nlohmann::json::array();
  for (const WindowBounds& w : family.bounds.members)
    per.push_back({{"l", w.l},
                   {"covered", w.covered},
                   {"min_b", number(w.min_b)},
                   {"max_a", number(w.max_a)},
                   {"min_ratio", number(w.min_ratio)}});
  bounds["members"] = std::move(per);
  nlohmann::json blow = nlohmann::json::array();
  for (const BlowdownSample& b : family.blowdown)
    blow.push_back({{"S", b.S},
                    {"time", b.time},
                    {"mid_radius", b.mid_radius},
                    {"cylinder_radius_ref", b.cylinder_radius_ref},
                    {"lambda_mid", b.lambda_mid},
                    {"mismatch", b.mismatch}});
  nlohmann::json out{{"members", std::move(members)},
                     {"convergence", std::move(convergence)},
                     {"bounds", std::move(bounds)},
                     {"blowdown", std::move(blow)},
                     {"degraded", family.degraded}};
  if (!family.blowdown_error.empty()) out["blowdown_error"] = family.blowdown_error;
  return out;
}

void write_family_plots(const std::string& dir, const OvaloidFamily& family, double t_profile) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  std::ofstream ratio(root / "ratio_vs_t.csv");
  ratio << std::setprecision(17) << "l,t,ratio\n";
  std::ofstream profiles(root / "profiles.csv");
  profiles << std::setprecision(17) << "l,x,u\n";
  for (const FamilyMember& m : family.members) {
    if (!m.run) continue;
    for (const Checkpoint& c : m.run->record.checkpoints)
      ratio << m.l << ',' << c.t << ',' << c.ratio << '\n';
    if (!m.run->record.covers(t_profile)) continue;
    const GeneratingCurve c = m.run->record.curve_at(t_profile);
    for (Eigen::Index i = 0; i < c.nodes(); ++i)
      profiles << m.l << ',' << c.x(i) << ',' << c.u(i) << '\n';
  }
  std::ofstream blow(root / "blowdown.csv");
  blow << std::setprecision(17) << "S,time,mid_radius,cylinder_radius_ref,lambda_mid,mismatch\n";
  for (const BlowdownSample& b : family.blowdown)
    blow << b.S << ',' << b.time << ',' << b.mid_radius << ',' << b.cylinder_radius_ref << ','
         << b.lambda_mid << ',' << b.mismatch << '\n';
}

}  // namespace axiflow
