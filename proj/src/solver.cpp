#include "axiflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "axiflow/curvature_algebra.hpp"
#include "axiflow/errors.hpp"

namespace axiflow {

namespace {

// Slightly negative lambda is used as is wherever the speed formula is
// defined, so the flow keeps pushing it back; elsewhere it is clamped to 0.
CurvatureVector speed_argument(const SpeedSpec& speed, int n, double lambda, double mu) {
  const CurvatureVector k{n, lambda, mu};
  if (lambda >= 0.0 || speed.in_domain(k)) return k;
  return {n, 0.0, mu};
}

// Geometry, node velocities and the stable step of one curve.
struct Evaluation {
  CurveGeometry g;
  Eigen::ArrayXd vx;
  Eigen::ArrayXd vu;
  double dt_cfl = 0;
};

Evaluation evaluate_nodes(const GeneratingCurve& c, const SpeedSpec& speed,
                          const StepControl& control, bool with_dt) {
  Evaluation e{geometry(c), Eigen::ArrayXd(c.nodes()), Eigen::ArrayXd(c.nodes()), 0.0};
  const Eigen::Index count = c.nodes();
  const double tol = control.cone_tol;
  double max_diffusion = 0.0;
  for (Eigen::Index i = 0; i < count; ++i) {
    const double lambda = e.g.lambda(i);
    const double mu = e.g.mu(i);
    if (!std::isfinite(lambda) || !std::isfinite(mu))
      throw NumericalBlowup("non-finite curvature at node " + std::to_string(i));
    if (!(mu > 0.0) || lambda < -tol * mu || lambda > (1 + tol) * mu) {
      std::ostringstream os;
      os << "node " << i << " left the cone: lambda = " << lambda << ", mu = " << mu;
      throw ConeExit(os.str());
    }
    const CurvatureVector k = speed_argument(speed, c.n, lambda, mu);
    double f;
    if (with_dt) {
      const SpeedDerivatives d = derivatives_unchecked(speed, k);
      f = d.f;
      max_diffusion = std::max(max_diffusion, d.df1 + (c.n - 1) * d.df2);
    } else {
      f = speed.value(k);
    }
    if (!std::isfinite(f)) throw NumericalBlowup("non-finite speed at node " + std::to_string(i));
    e.vx(i) = -f * e.g.normal_x(i);
    e.vu(i) = -f * e.g.normal_u(i);
  }
  e.vu(0) = 0.0;
  e.vu(count - 1) = 0.0;
  if (with_dt) {
    double min_h = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 1; i < count; ++i)
      min_h = std::min(min_h, (c.node(i) - c.node(i - 1)).norm());
    if (!(min_h > 0.0)) throw DegenerateMesh("cfl_dt: zero node spacing");
    if (!(max_diffusion > 0.0) || !std::isfinite(max_diffusion))
      throw NumericalBlowup("cfl_dt: diffusion coefficient is not positive and finite");
    e.dt_cfl = std::min(control.cfl * min_h * min_h / max_diffusion, control.max_dt);
  }
  return e;
}

GeneratingCurve advanced(const GeneratingCurve& c, const Evaluation& e, double dt) {
  GeneratingCurve out = c;
  out.x.array() += dt * e.vx;
  out.u.array() += dt * e.vu;
  out.u(0) = 0.0;
  out.u(out.segments()) = 0.0;
  if (!out.x.allFinite() || !out.u.allFinite()) throw NumericalBlowup("non-finite node position");
  return out;
}

FlowState advance(const FlowState& state, const Evaluation& e0, const SpeedSpec& speed,
                  const StepControl& control, double dt) {
  const GeneratingCurve half = advanced(state.curve, e0, 0.5 * dt);
  const Evaluation e1 = evaluate_nodes(half, speed, control, false);
  FlowState next = state;
  next.curve = advanced(state.curve, e1, dt);
  next.t_local += dt;
  next.steps += 1;
  if (next.steps % control.resample_every == 0)
    next.curve = resample(next.curve, control.angle_weight);
  return next;
}

double max_curvature(const CurveGeometry& g) {
  return std::max(g.lambda.maxCoeff(), g.mu.maxCoeff());
}

}  // namespace

FlowState initial_state(const GeneratingCurve& curve, double t0) {
  validate(curve);
  FlowState s;
  s.curve = curve;
  s.t_base = t0;
  return s;
}

void validate(const StepControl& c) {
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw BadParam("step control: cfl must lie in (0, 1]");
  if (!(c.max_dt > 0.0)) throw BadParam("step control: max_dt must be positive");
  if (!(c.angle_weight >= 0.0)) throw BadParam("step control: angle_weight must be >= 0");
  if (c.resample_every < 1) throw BadParam("step control: resample_every must be >= 1");
  if (c.checkpoint_every < 1) throw BadParam("step control: checkpoint_every must be >= 1");
  if (c.snapshot_every < 0) throw BadParam("step control: snapshot_every must be >= 0");
  if (c.rescale_trigger < 0.0) throw BadParam("step control: rescale_trigger must be >= 0");
  if (c.rescale_trigger > 0.0 && !(c.rescale_target > 0.0 && c.rescale_target < c.rescale_trigger))
    throw BadParam("step control: need 0 < rescale_target < rescale_trigger");
  if (!(c.cone_tol >= 0.0)) throw BadParam("step control: cone_tol must be >= 0");
}

void validate(const StopConditions& s) {
  if (!(s.max_curvature > 0.0)) throw BadParam("stop: max_curvature must be positive");
  if (s.roundness_eps && !(*s.roundness_eps > 0.0))
    throw BadParam("stop: roundness_eps must be positive");
  if (s.max_steps < 1) throw BadParam("stop: max_steps must be positive");
}

double cfl_dt(const FlowState& state, const SpeedSpec& speed, const StepControl& control) {
  StepControl loose = control;
  loose.cone_tol = std::numeric_limits<double>::infinity();
  return evaluate_nodes(state.curve, speed, loose, true).dt_cfl;
}

FlowState step(const FlowState& state, const SpeedSpec& speed, const StepControl& control,
               double dt) {
  if (!(dt > 0.0)) throw BadParam("step: dt must be positive");
  return advance(state, evaluate_nodes(state.curve, speed, control, false), speed, control, dt);
}

FlowState step(const FlowState& state, const SpeedSpec& speed, const StepControl& control) {
  const Evaluation e = evaluate_nodes(state.curve, speed, control, true);
  return advance(state, e, speed, control, e.dt_cfl);
}

namespace {

// Folds t_local into t_base so that lambda_total can change.
FlowState freeze_time(FlowState s, double alpha) {
  s.t_base = s.time(alpha);
  s.t_local = 0.0;
  return s;
}

}  // namespace

FlowState rescale_continuation(const FlowState& state, const SpeedSpec& speed, double trigger,
                               double target) {
  const CurveGeometry g = geometry(state.curve);
  const double kmax = max_curvature(g);
  if (kmax < trigger) return state;
  FlowState next = freeze_time(state, speed.alpha());
  const GeneratingCurve& c = state.curve;
  const double center = 0.5 * (c.x(0) + c.x(c.segments()));
  const double factor = kmax / target;
  next.curve = scaled(c, factor, center);
  next.ledger.x_center += center / state.ledger.lambda_total;
  next.ledger.lambda_total *= factor;
  next.ledger.rescalings += 1;
  return next;
}

Checkpoint diagnose(const FlowState& state, const SpeedSpec& speed) {
  const double alpha = speed.alpha();
  const int n = state.curve.n;
  const double L = state.ledger.lambda_total;
  const double speed_scale = std::pow(L, alpha);
  const CurveGeometry g = geometry(state.curve);
  const GeneratingCurve orig = state.original_curve();
  const ShapeMetrics m = metrics(orig);

  Checkpoint c;
  c.t = state.time(alpha);
  c.step = state.steps;
  c.a = m.a;
  c.b = m.b;
  c.ratio = m.ratio;
  c.center = m.center;
  c.min_lambda = g.lambda.minCoeff() * L;
  c.max_lambda = g.lambda.maxCoeff() * L;
  c.min_mu = g.mu.minCoeff() * L;
  c.max_mu = g.mu.maxCoeff() * L;
  c.mu_ratio = c.max_mu / c.min_mu;
  c.min_mu_minus_lambda = (g.mu - g.lambda).minCoeff() * L;
  c.max_curvature = max_curvature(g) * L;
  c.lambda_total = L;

  const double sigma = 1.0 / (n * (n - 1.0));
  double max_h = 0, min_f = std::numeric_limits<double>::infinity(), max_f = 0;
  double z = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < state.curve.nodes(); ++i) {
    const CurvatureVector k{n, g.lambda(i), g.mu(i)};
    const double h = k.mean();
    max_h = std::max(max_h, h);
    z = std::max(z, z_sigma(k, sigma) / (h * h));
    const double f = speed.value(speed_argument(speed, n, k.lambda, k.mu));
    min_f = std::min(min_f, f);
    max_f = std::max(max_f, f);
  }
  c.max_h = max_h * L;
  c.min_f = min_f * speed_scale;
  c.max_f = max_f * speed_scale;
  c.z_margin = z;
  c.s_plus = support(orig, Eigen::Vector2d(1.0, 0.0), false);
  c.s_minus = support(orig, Eigen::Vector2d(-1.0, 0.0), false);
  return c;
}

RunRecord run(const GeneratingCurve& initial, const SpeedSpec& speed,
              const StepControl& control, const StopConditions& stop) {
  validate(initial);
  const std::vector<CurvatureVector> ks = curvatures_at(initial);
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (!cone_contains(ks[i], control.cone_tol * ks[i].mu))
      throw BadParam("run: initial curve is not convex and axially stretched at node " +
                     std::to_string(i));
  return run_from(initial_state(initial), speed, control, stop);
}

RunRecord run_from(const FlowState& start, const SpeedSpec& speed, const StepControl& control,
                   const StopConditions& stop) {
  validate(control);
  validate(stop);
  if (start.curve.n != speed.n()) throw BadParam("run: curve and speed disagree on n");
  const double alpha = speed.alpha();

  RunRecord record;
  record.speed_id = speed.id();
  record.n = speed.n();
  record.alpha = alpha;
  record.nodes = int(start.curve.nodes());

  int checkpoint_count = 0;
  auto push = [&](const FlowState& s, const std::string& event) {
    if (!record.checkpoints.empty() && record.checkpoints.back().step == s.steps) {
      if (event != "step") record.checkpoints.back().event = event;
      if (event == "terminal" && control.snapshot_every > 0 && !record.checkpoints.back().snapshot)
        record.checkpoints.back().snapshot = s.original_curve();
      return;
    }
    Checkpoint c = diagnose(s, speed);
    c.event = event;
    const bool keep = control.snapshot_every > 0 &&
                      (event == "start" || event == "terminal" ||
                       checkpoint_count % control.snapshot_every == 0);
    if (keep) c.snapshot = s.original_curve();
    record.checkpoints.push_back(std::move(c));
    ++checkpoint_count;
  };

  FlowState state = start;
  push(state, "start");
  Evaluation ev = evaluate_nodes(state.curve, speed, control, true);

  while (true) {
    if (state.steps - start.steps >= stop.max_steps) {
      record.terminal_reason = "max_steps";
      break;
    }
    double dt = ev.dt_cfl;
    bool last = false;
    if (stop.t_end) {
      const double scale = std::pow(state.ledger.lambda_total, 1.0 + alpha);
      const double remaining = (*stop.t_end - state.time(alpha)) * scale;
      if (remaining <= 0.0) {
        record.terminal_reason = "t_end";
        break;
      }
      if (dt >= remaining) {
        dt = remaining;
        last = true;
      }
    }
    state = advance(state, ev, speed, control, dt);
    if (last) {
      // Land exactly on t_end despite the base/local split.
      state = freeze_time(state, alpha);
      state.t_base = *stop.t_end;
      record.terminal_reason = "t_end";
      break;
    }

    ev = evaluate_nodes(state.curve, speed, control, true);
    const CurveGeometry& g = ev.g;
    const double kmax = max_curvature(g);
    if (kmax * state.ledger.lambda_total >= stop.max_curvature) {
      record.terminal_reason = "max_curvature";
      break;
    }
    if (stop.roundness_eps) {
      const ShapeMetrics m = metrics(state.curve);
      const double mu_ratio = g.mu.maxCoeff() / g.mu.minCoeff();
      if (m.ratio - 1.0 <= *stop.roundness_eps && mu_ratio - 1.0 <= *stop.roundness_eps) {
        record.terminal_reason = "roundness";
        break;
      }
    }
    if (control.rescale_trigger > 0.0 && kmax >= control.rescale_trigger) {
      state = rescale_continuation(state, speed, control.rescale_trigger,
                                   control.rescale_target);
      push(state, "rescale");
      ev = evaluate_nodes(state.curve, speed, control, true);
      continue;
    }
    if (state.steps % control.checkpoint_every == 0) push(state, "step");
  }
  push(state, "terminal");
  return record;
}

namespace {

// Singular time from a least-squares line through (t, b^{1+alpha}).
double fit_singular_time(const RunRecord& r, std::size_t first, std::size_t last) {
  const double p = 1.0 + r.alpha;
  const double t0 = r.checkpoints[last - 1].t;
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double count = double(last - first);
  for (std::size_t i = first; i < last; ++i) {
    const double t = r.checkpoints[i].t - t0;
    const double y = std::pow(r.checkpoints[i].b, p);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double denom = count * stt - st * st;
  if (!(std::abs(denom) > 0.0)) throw InsufficientData("degenerate singular-time fit");
  const double slope = (count * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / count;
  return t0 - intercept / slope;
}

}  // namespace

RoundPointDetection detect_round_point(const RunRecord& record, double eps, int window) {
  if (record.checkpoints.size() < 3)
    throw InsufficientData("detect_round_point: need at least 3 checkpoints");
  const std::size_t count = record.checkpoints.size();
  const std::size_t w = std::min<std::size_t>(std::max(window, 2), count - 1);

  RoundPointDetection d;
  d.t_singular_estimate = fit_singular_time(record, count - w, count);
  d.t_singular_previous = fit_singular_time(record, count - w - 1, count - 1);

  const bool reached_singularity =
      record.terminal_reason == "max_curvature" || record.terminal_reason == "roundness";
  if (!reached_singularity) return d;
  for (const Checkpoint& c : record.checkpoints) {
    if (c.ratio <= 1.0 + eps && c.mu_ratio <= 1.0 + eps) {
      d.detected = true;
      d.t_detect = c.t;
      break;
    }
  }
  return d;
}

}  // namespace axiflow
