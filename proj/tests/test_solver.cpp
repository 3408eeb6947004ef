#include <doctest.h>

#include <cmath>
#include <sstream>

#include "axiflow/errors.hpp"
#include "axiflow/solver.hpp"
#include "oracles.hpp"

using namespace axiflow;

namespace {

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

std::string jsonl(const RunRecord& r) {
  std::ostringstream os;
  write_jsonl(os, r);
  return os.str();
}

}  // namespace

TEST_CASE("sphere follows the closed-form radius") {
  for (auto [n, a] : {std::pair{2, 1.0}, std::pair{3, 2.0}}) {
    const SpeedSpec s = SpeedSpec::mean_power(n, a);
    const double T = oracle::sphere_lifespan(n, a, 1.0);
    StepControl ctl;
    StopConditions stop;
    stop.t_end = 0.5 * T;
    const RunRecord half = run(make_sphere(1.0, 64, n), s, ctl, stop);
    CHECK(half.terminal_reason == "t_end");
    CHECK(half.back().t == doctest::Approx(0.5 * T).epsilon(1e-14));
    CHECK(half.back().b == doctest::Approx(oracle::sphere_radius(n, a, 1.0, 0.5 * T)).epsilon(1e-3));

    stop.t_end.reset();
    stop.max_curvature = 1e3;
    const RunRecord full = run(make_sphere(1.0, 64, n), s, ctl, stop);
    CHECK(full.terminal_reason == "max_curvature");
    const RoundPointDetection d = detect_round_point(full, 0.01);
    CHECK(d.detected);
    CHECK(d.t_singular_estimate == doctest::Approx(T).epsilon(1e-2));
  }
}

TEST_CASE("the middle of a long capsule shrinks like the cylinder") {
  const SpeedSpec s = SpeedSpec::mean_power(2, 1.0);
  StepControl ctl;
  ctl.snapshot_every = 1;
  StopConditions stop;
  stop.t_end = 0.2;
  const RunRecord r = run(make_spherocylinder(8.0, 1.0, 160, 2, 1.0), s, ctl, stop);
  const GeneratingCurve c = *r.back().snapshot;
  CHECK(metrics(c).b == doctest::Approx(oracle::cylinder_radius(2, 1.0, 1.0, 0.2)).epsilon(1e-3));
}

TEST_CASE("a step keeps mirror symmetry and the cone") {
  const SpeedSpec s = SpeedSpec::blended_quadratic(3, 2.0, 1.0, 1.0);
  FlowState st = initial_state(make_spherocylinder(2.0, 1.0, 64, 3, 1.0));
  StepControl ctl;
  for (int i = 0; i < 50; ++i) st = step(st, s, ctl);
  const GeneratingCurve& c = st.curve;
  for (int i = 0; i <= 64; ++i) {
    CHECK(c.x(i) == doctest::Approx(-c.x(64 - i)).epsilon(1e-9));
    CHECK(c.u(i) == doctest::Approx(c.u(64 - i)).epsilon(1e-9));
  }
  for (const CurvatureVector& k : curvatures_at(c)) CHECK(cone_contains(k, 1e-6 * k.mu));
  CHECK(st.steps == 50);
  CHECK(st.time(2.0) > 0.0);
}

TEST_CASE("time step scales with the square of the spacing") {
  const SpeedSpec s = SpeedSpec::mean_power(2, 1.0);
  const StepControl ctl;
  const double dt64 = cfl_dt(initial_state(make_sphere(1.0, 64, 2)), s, ctl);
  const double dt128 = cfl_dt(initial_state(make_sphere(1.0, 128, 2)), s, ctl);
  CHECK(dt64 / dt128 == doctest::Approx(4.0).epsilon(0.02));
  StepControl capped;
  capped.max_dt = 1e-7;
  CHECK(cfl_dt(initial_state(make_sphere(1.0, 64, 2)), s, capped) == 1e-7);
}

TEST_CASE("rescaling leaves the original-frame curve and time alone") {
  const SpeedSpec s = SpeedSpec::mean_power(2, 2.0);
  FlowState st = initial_state(make_spherocylinder(1.0, 1.0, 64, 2, 1.0), 0.5);
  st.curve.x.array() += 0.25;
  for (int i = 0; i < 20; ++i) st = step(st, s, StepControl{});
  const FlowState r = rescale_continuation(st, s, 0.5, 4.0);
  CHECK(r.ledger.rescalings == 1);
  CHECK(r.ledger.lambda_total < 1.0);
  const GeneratingCurve a = st.original_curve(), b = r.original_curve();
  CHECK(max_abs(a.x - b.x) < 1e-13);
  CHECK(max_abs(a.u - b.u) < 1e-13);
  CHECK(r.time(2.0) == doctest::Approx(st.time(2.0)).epsilon(1e-15));
  CHECK(metrics(r.curve).center == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rescale_continuation(st, s, 1e6, 4.0).ledger.rescalings == 0);
}

TEST_CASE("continuation reaches high curvature without changing the law") {
  const SpeedSpec s = SpeedSpec::mean_power(2, 1.0);
  StepControl ctl;
  ctl.rescale_trigger = 4.0;
  ctl.rescale_target = 1.0;
  StopConditions stop;
  stop.max_curvature = 1e4;
  const RunRecord r = run(make_sphere(1.0, 48, 2), s, ctl, stop);
  CHECK(r.back().max_curvature >= 1e4);
  CHECK(r.back().lambda_total > 1e3);
  CHECK(r.back().t == doctest::Approx(0.25).epsilon(1e-4));
  int rescales = 0;
  for (const Checkpoint& c : r.checkpoints) rescales += c.event == "rescale";
  CHECK(rescales > 3);
}

TEST_CASE("runs are deterministic and round-trip through JSON lines") {
  const SpeedSpec s = SpeedSpec::mean_power(2, 2.0);
  StepControl ctl;
  ctl.checkpoint_every = 50;
  StopConditions stop;
  stop.max_steps = 2000;
  const GeneratingCurve seed = make_spherocylinder(2.0, 1.0, 48, 2, 1.0);
  const RunRecord a = run(seed, s, ctl, stop);
  const RunRecord b = run(seed, s, ctl, stop);
  CHECK(a.terminal_reason == "max_steps");
  CHECK(jsonl(a) == jsonl(b));
  std::istringstream is(jsonl(a));
  const RunRecord back = read_jsonl(is);
  CHECK(jsonl(back) == jsonl(a));
  CHECK(back.checkpoints.size() == a.checkpoints.size());
  CHECK(back.back().ratio == a.back().ratio);
}

TEST_CASE("bad inputs") {
  const SpeedSpec s = SpeedSpec::mean_power(2, 1.0);
  StepControl ctl;
  ctl.cfl = 0.0;
  CHECK_THROWS_AS(validate(ctl), BadParam);
  StopConditions stop;
  stop.max_steps = 0;
  CHECK_THROWS_AS(validate(stop), BadParam);

  // dumbbell: not convex
  GeneratingCurve c = make_spherocylinder(2.0, 1.0, 64, 2);
  for (int i = 20; i <= 44; ++i) c.u(i) *= 0.6 + 0.4 * std::abs(i - 32) / 12.0;
  CHECK_THROWS_AS(run(c, s, StepControl{}, StopConditions{}), BadParam);
}

TEST_CASE("round-point detection needs a terminal singular stop") {
  RunRecord r = oracle::sphere_record(2, 1.0, 1.0, 40);
  CHECK(detect_round_point(r, 0.01).detected);
  CHECK(detect_round_point(r, 0.01).t_singular_estimate == doctest::Approx(0.25));
  r.terminal_reason = "max_steps";
  CHECK_FALSE(detect_round_point(r, 0.01).detected);
  r.checkpoints.resize(2);
  CHECK_THROWS_AS(detect_round_point(r, 0.01), InsufficientData);
}
