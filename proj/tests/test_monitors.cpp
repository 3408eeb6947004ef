#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>

#include "axiflow/errors.hpp"
#include "axiflow/monitors.hpp"
#include "oracles.hpp"

using namespace axiflow;

namespace {

const SpeedSpec kSpeed = SpeedSpec::mean_power(2, 1.0);

RunRecord clean() { return oracle::sphere_record(2, 1.0, 1.0, 400); }

// Applies `fault` to checkpoint k of the clean record and returns the audit.
AuditReport inject(std::size_t k, const std::function<void(Checkpoint&)>& fault) {
  RunRecord r = clean();
  fault(r.checkpoints[k]);
  return audit(r, kSpeed);
}

void only_fails(const AuditReport& report, const std::string& name, double t) {
  CHECK_FALSE(report.pass);
  for (const CheckResult& c : report.checks) {
    CAPTURE(c.name);
    if (c.name == name) {
      CHECK_FALSE(c.pass);
      CHECK(c.worst_margin < 0.0);
      CHECK(c.worst_time == doctest::Approx(t));
    } else {
      CHECK(c.pass);
    }
  }
}

}  // namespace

TEST_CASE("exact sphere record passes every check") {
  const AuditReport r = audit(clean(), kSpeed);
  CHECK(r.pass);
  REQUIRE(r.checks.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(r.checks[i].name == kAuditChecks[i]);
    CHECK(r.checks[i].evaluated);
  }
  CHECK(r.check("pinching").worst_margin == doctest::Approx(0.5 + 1e-3));
}

TEST_CASE("fault: axial curvature above the radial one") {
  const std::size_t k = 150;
  const double t = clean().checkpoints[k].t;
  only_fails(inject(k, [](Checkpoint& c) { c.min_mu_minus_lambda = -c.max_mu; }),
             "axially_stretched", t);
}

TEST_CASE("fault: pinching lost") {
  const std::size_t k = 200;
  only_fails(inject(k, [](Checkpoint& c) { c.z_margin = 0.05; }), "pinching",
             clean().checkpoints[k].t);
}

TEST_CASE("fault: minimum speed drops") {
  const std::size_t k = 120;
  only_fails(inject(k, [](Checkpoint& c) { c.min_f *= 0.9; }), "min_speed_monotone",
             clean().checkpoints[k].t);
}

TEST_CASE("fault: body escapes the comparison spheres") {
  const std::size_t k = 100;
  only_fails(inject(k, [](Checkpoint& c) { c.a *= 0.2; }), "sphere_sandwich",
             clean().checkpoints[k].t);
}

TEST_CASE("fault: support falls faster than the speed allows") {
  const std::size_t k = 250;
  const RunRecord r = clean();
  const double dt = r.checkpoints[k].t - r.checkpoints[k - 1].t;
  only_fails(inject(k, [&](Checkpoint& c) { c.s_plus -= 10 * 2 * dt * c.max_f; }),
             "speed_lower_bound", r.checkpoints[k].t);
}

TEST_CASE("fault: speed out of proportion to the radial curvature") {
  const std::size_t k = 300;
  only_fails(inject(k, [](Checkpoint& c) { c.max_f *= 2.0; }), "speed_comparability",
             clean().checkpoints[k].t);
}

TEST_CASE("fault: eccentricity halves within the halving time") {
  const std::size_t k = 50;
  only_fails(inject(k, [](Checkpoint& c) { c.ratio = 0.4; }), "ratio_halving",
             clean().checkpoints[k].t);
}

TEST_CASE("tolerances move the verdict") {
  AuditTolerances loose;
  loose.cone = 2.0;
  RunRecord r = clean();
  r.checkpoints[10].min_mu_minus_lambda = -r.checkpoints[10].max_mu;
  CHECK(audit(r, kSpeed, loose).pass);
}

TEST_CASE("sandwich check needs a singular end") {
  RunRecord r = clean();
  r.terminal_reason = "max_steps";
  const AuditReport rep = audit(r, kSpeed);
  CHECK_FALSE(rep.check("sphere_sandwich").evaluated);
  CHECK(rep.check("sphere_sandwich").pass);
}

TEST_CASE("halving time") {
  CHECK(halving_time_bound(kSpeed, 2.0) == doctest::Approx(1.0 / 256));
  CHECK(halving_time_bound(kSpeed, 0.0) == 0.0);
  const SpeedSpec s2 = SpeedSpec::mean_power(2, 2.0);
  const double r0 = std::cbrt(12.0);
  CHECK(halving_time_bound(s2, r0) == doctest::Approx(1.0 / 4096));

  RunRecord r = clean();
  CHECK_THROWS_AS(halving_time_bound(r, kSpeed), InsufficientData);
  r.normalized = true;
  for (Checkpoint& c : r.checkpoints) c.t -= 1.1;
  CHECK(halving_time_bound(r, kSpeed) == doctest::Approx(1.0 / 256));
}

TEST_CASE("audit input errors") {
  RunRecord r = clean();
  CHECK_THROWS_AS(audit(r, SpeedSpec::mean_power(3, 1.0)), BadParam);
  r.checkpoints.resize(1);
  CHECK_THROWS_AS(audit(r, kSpeed), InsufficientData);
  RunRecord back = clean();
  back.checkpoints[5].t = back.checkpoints[4].t;
  CHECK_THROWS_AS(audit(back, kSpeed), InsufficientData);
}

TEST_CASE("report JSON") {
  const nlohmann::json j = to_json(audit(clean(), kSpeed));
  CHECK(j["pass"] == true);
  CHECK(j["checks"].size() == 7);
  CHECK(j["checks"][0]["name"] == "axially_stretched");
}
