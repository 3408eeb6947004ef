// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Scenario details go to stdout as indented lines.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "axiflow/curvature_algebra.hpp"
#include "axiflow/errors.hpp"
#include "axiflow/monitors.hpp"
#include "axiflow/ovaloid.hpp"
#include "axiflow/solver.hpp"
#include "oracles.hpp"

using namespace axiflow;

namespace {

constexpr int kN = 128;
// Step budget for a single flow run; runs that neither round off nor reach
// the curvature cap within it count as failures.
constexpr long kBudget = 1'000'000;
constexpr double kCurvatureCap = 1e4;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

[[gnu::format(printf, 1, 2)]] void detail(const char* fmt, ...) {
  std::va_list args;
  va_start(args, fmt);
  std::printf("    ");
  std::vprintf(fmt, args);
  std::printf("\n");
  va_end(args);
  std::fflush(stdout);
}

StepControl flow_control() {
  StepControl c;
  c.rescale_trigger = 4.0;
  c.rescale_target = 1.0;
  c.snapshot_every = 1;
  return c;
}

StopConditions flow_stop() {
  StopConditions s;
  s.max_curvature = kCurvatureCap;
  s.roundness_eps = 0.02;
  s.max_steps = kBudget;
  return s;
}

// (1) shrinking spheres against the separable ODE.
bool sphere_law() {
  bool ok = true;
  for (auto [n, a] : {std::pair{2, 1.0}, std::pair{2, 2.0}, std::pair{3, 1.0}, std::pair{3, 2.0}}) {
    const SpeedSpec s = SpeedSpec::mean_power(n, a);
    const double T = oracle::sphere_lifespan(n, a, 1.0);
    StepControl ctl;
    ctl.checkpoint_every = 20;
    StopConditions stop;
    stop.max_curvature = 100.0;
    const RunRecord full = run(make_sphere(1.0, 256, n), s, ctl, stop);
    const double T_sim = detect_round_point(full, 0.01).t_singular_estimate;
    stop = {};
    stop.t_end = 0.5 * T;
    const RunRecord half = run(make_sphere(1.0, 256, n), s, ctl, stop);
    const double R = oracle::sphere_radius(n, a, 1.0, 0.5 * T);
    const double t_err = std::abs(T_sim - T) / T;
    const double r_err = std::abs(half.back().b - R) / R;
    const bool pass = t_err <= 1e-2 && r_err <= 1e-3;
    detail("n=%d alpha=%g: extinction %.6f vs %.6f (rel %.2e), radius at T/2 rel err %.2e %s", n,
           a, T_sim, T, t_err, r_err, pass ? "" : "<- fail");
    ok = ok && pass;
  }
  return ok;
}

// (2) algebra suites at the full sample counts.
bool algebra() {
  const AlgebraReport r = run_algebra_suites(SpeedSpec::mean_power(2, 2.0));
  bool ok = true;
  for (const char* name : {"pinch_identity", "reaction_gap", "euler_residuals", "evofg_vs_evofg1",
                           "gradterms_vs_evofg1"}) {
    const SuiteResult& s = r.suite(name);
    detail("%-20s %6d samples, %d violations, worst %.2e (tol %.0e)", name, s.samples,
           s.violations, s.worst, s.tolerance);
    ok = ok && s.violations == 0;
  }
  return ok;
}

struct Scenario {
  std::string label;
  SpeedSpec speed;
  int n;
  double l;
};

struct ScenarioResult {
  bool audit_pass = false;
  bool detected = false;
  bool round = false;
  std::string note;
};

// (3) and (4) share the runs.
std::vector<ScenarioResult> invariant_scenarios() {
  std::vector<Scenario> list;
  for (int n : {2, 3}) {
    for (double l : {2.0, 4.0}) {
      list.push_back({"mean-power a=1", SpeedSpec::mean_power(n, 1.0), n, l});
      list.push_back({"mean-power a=2", SpeedSpec::mean_power(n, 2.0), n, l});
      list.push_back({"blended-quadratic a=2", SpeedSpec::blended_quadratic(n, 2.0, 1.0, 1.0), n, l});
    }
  }
  std::vector<ScenarioResult> out;
  for (const Scenario& sc : list) {
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioResult res;
    try {
      StepControl ctl = flow_control();
      ctl.snapshot_every = 0;
      const RunRecord r = run(make_spherocylinder(sc.l, 1.0, kN, sc.n, ctl.angle_weight), sc.speed,
                              ctl, flow_stop());
      const AuditReport rep = audit(r, sc.speed);
      res.audit_pass = rep.pass;
      for (const CheckResult& c : rep.checks)
        if (!c.pass) res.note += " " + c.name;
      res.detected = detect_round_point(r, 0.05).detected;
      for (const Checkpoint& c : r.checkpoints)
        if (c.ratio <= 1.05 && c.mu_ratio <= 1.05) res.round = true;
      double max_ratio = 0;
      for (const Checkpoint& c : r.checkpoints) max_ratio = std::max(max_ratio, c.ratio);
      res.note = r.terminal_reason + ", steps " + std::to_string(r.back().step) +
                 ", final a/b " + std::to_string(r.back().ratio) + ", max a/b " +
                 std::to_string(max_ratio) + (res.note.empty() ? "" : ", failed:" + res.note);
    } catch (const Error& e) {
      res.note = e.what();
    }
    detail("%-22s n=%d l=%g: audit %s, round %s (%s) [%.0fs]", sc.label.c_str(), sc.n, sc.l,
           res.audit_pass ? "pass" : "FAIL", res.round && res.detected ? "yes" : "no",
           res.note.c_str(), seconds_since(t0));
    out.push_back(res);
  }
  return out;
}

struct FamilyRun {
  double alpha;
  OvaloidFamily family;
};

std::vector<FamilyRun> families() {
  std::vector<FamilyRun> out;
  for (double a : {1.0, 2.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    FamilyOptions o;
    o.N = kN;
    o.control = flow_control();
    o.stop = flow_stop();
    FamilyRun f{a, build_family({2.0, 4.0, 8.0}, SpeedSpec::mean_power(2, a), o)};
    for (const FamilyMember& m : f.family.members) {
      if (m.run)
        detail("alpha=%g l=%g: T_l %.4f, audit %s, terminal %s", a, m.l, m.run->T_l,
               m.audit && m.audit->pass ? "pass" : "FAIL", m.terminal_reason.c_str());
      else
        detail("alpha=%g l=%g: no normalized run, terminal %s (%s)", a, m.l,
               m.terminal_reason.c_str(), m.error.c_str());
    }
    detail("alpha=%g family built in %.0fs", a, seconds_since(t0));
    out.push_back(std::move(f));
  }
  return out;
}

// (5) normalization, backward times, convergence and window bounds.
bool family_criterion(const std::vector<FamilyRun>& runs) {
  bool ok = true;
  for (const FamilyRun& f : runs) {
    const auto& ms = f.family.members;
    bool all = true;
    for (const FamilyMember& m : ms) {
      if (!m.run) {
        all = false;
        continue;
      }
      for (const Checkpoint& c : m.run->record.checkpoints)
        if (c.t == -1.0 && std::abs(c.ratio - 2.0) > 1e-2) all = false;
    }
    bool increasing = all;
    for (std::size_t i = 1; all && i < ms.size(); ++i)
      increasing = increasing && ms[i].run->T_l > ms[i - 1].run->T_l;
    const auto& conv = f.family.convergence;
    const bool decaying = all && conv.size() == 2 && conv[1].distance < conv[0].distance;
    bool bounds = all;
    for (const WindowBounds& w : f.family.bounds.members)
      bounds = bounds && w.covered && w.min_b > 0 && w.min_ratio >= 2.0 - 1e-2;
    bounds = bounds && f.family.bounds.A_spread <= 0.25;
    detail("alpha=%g: normalized %s, T_l increasing %s, distance decay %s, window bounds %s "
           "(A spread %.3f)",
           f.alpha, all ? "yes" : "no", increasing ? "yes" : "no", decaying ? "yes" : "no",
           bounds ? "yes" : "no", f.family.bounds.A_spread);
    for (const ConvergenceEntry& e : conv)
      detail("alpha=%g: distance(l=%g, l=%g, t=%g) = %.3e", f.alpha, e.l1, e.l2, e.t, e.distance);
    ok = ok && all && increasing && decaying && bounds;
  }
  return ok;
}

// (6) blowdown of the l = 8 member.
bool blowdown_criterion(const std::vector<FamilyRun>& runs) {
  bool ok = true;
  for (const FamilyRun& f : runs) {
    const FamilyMember& last = f.family.members.back();
    if (last.l != 8.0 || !last.run) {
      detail("alpha=%g: l = 8 member unavailable", f.alpha);
      ok = false;
      continue;
    }
    const auto& b = f.family.blowdown;
    if (b.size() != 3) {
      detail("alpha=%g: blowdown failed: %s", f.alpha, f.family.blowdown_error.c_str());
      ok = false;
      continue;
    }
    bool pass = b[2].mismatch <= 0.10;
    for (std::size_t i = 1; i < b.size(); ++i) {
      const double slack = i + 1 == b.size() ? 1.1 : 1.0;
      pass = pass && std::abs(b[i].lambda_mid) <= slack * std::abs(b[i - 1].lambda_mid) &&
             b[i].mismatch <= slack * b[i - 1].mismatch;
    }
    for (const BlowdownSample& s : b)
      detail("alpha=%g S=%g: lambda_mid %.4e, mismatch %.4f", f.alpha, s.S, s.lambda_mid,
             s.mismatch);
    ok = ok && pass;
  }
  return ok;
}

// (7) sign of the reduced bracket and a positive admissible exponent.
bool sign_property() {
  AlgebraSuiteOptions o;
  o.identity_samples = o.reaction_samples = o.euler_samples = o.bracket_samples =
      o.gamma0_samples = 0;
  o.sigma0 = 0.2;
  const AlgebraReport r = run_algebra_suites(SpeedSpec::mean_power(2, 2.0), o);
  const SuiteResult& s = r.suite("zsigma_reduced_sign");
  int speeds = 0;
  for (const SpeedSpec& sp : builtin_speed_catalog()) speeds += sp.alpha() > 1.0;
  detail("zsigma_reduced: %d samples over %d speeds, %d positive", s.samples, speeds,
         s.violations);
  detail("find_admissible_l(mean-power a=2, n=2, sigma0=0.2) = %.2f", r.admissible.l);
  return s.violations == 0 && s.samples == 10000 * speeds && r.admissible.l > 0.0;
}

// (8) every audit check fires on a record with one injected fault.
bool fault_injection() {
  const SpeedSpec s = SpeedSpec::mean_power(2, 1.0);
  const RunRecord clean = oracle::sphere_record(2, 1.0, 1.0, 400);
  if (!audit(clean, s).pass) {
    detail("clean sphere record fails the audit");
    return false;
  }
  const double dt = clean.checkpoints[1].t - clean.checkpoints[0].t;
  const std::vector<std::pair<const char*, std::function<void(Checkpoint&)>>> faults{
      {"axially_stretched", [](Checkpoint& c) { c.min_mu_minus_lambda = -c.max_mu; }},
      {"pinching", [](Checkpoint& c) { c.z_margin = 0.05; }},
      {"min_speed_monotone", [](Checkpoint& c) { c.min_f *= 0.9; }},
      {"sphere_sandwich", [](Checkpoint& c) { c.a *= 0.2; }},
      {"speed_lower_bound", [dt](Checkpoint& c) { c.s_plus -= 20 * dt * c.max_f; }},
      {"speed_comparability", [](Checkpoint& c) { c.max_f *= 2.0; }},
      {"ratio_halving", [](Checkpoint& c) { c.ratio = 0.4; }}};
  bool ok = true;
  for (const auto& [name, fault] : faults) {
    RunRecord r = clean;
    fault(r.checkpoints[150]);
    const AuditReport rep = audit(r, s);
    const bool fired = !rep.check(name).pass && rep.check(name).worst_margin < 0;
    detail("%-20s %s (margin %.3e)", name, fired ? "fires" : "SILENT", rep.check(name).worst_margin);
    ok = ok && fired;
  }
  return ok;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  int failures = 0;
  auto report = [&](int id, const char* what, const std::function<bool()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    try {
      pass = body();
    } catch (const std::exception& e) {
      detail("error: %s", e.what());
    }
    failures += !pass;
    std::printf("%s criterion %d: %s [%.0fs]\n", pass ? "PASS" : "FAIL", id, what,
                seconds_since(t0));
    std::fflush(stdout);
  };

  report(1, "sphere law", sphere_law);
  report(2, "algebra suite", algebra);
  std::vector<ScenarioResult> scenarios;
  report(3, "invariant preservation", [&] {
    scenarios = invariant_scenarios();
    bool ok = !scenarios.empty();
    for (const ScenarioResult& r : scenarios) ok = ok && r.audit_pass && r.detected;
    return ok;
  });
  report(4, "round point", [&] {
    bool ok = !scenarios.empty();
    for (const ScenarioResult& r : scenarios) ok = ok && r.round && r.detected;
    return ok;
  });
  std::vector<FamilyRun> fams;
  report(5, "ovaloid family", [&] {
    fams = families();
    return family_criterion(fams);
  });
  report(6, "blowdown", [&] { return !fams.empty() && blowdown_criterion(fams); });
  report(7, "sign property", sign_property);
  report(8, "fault falsifiability", fault_injection);

  std::printf("%d of 8 criteria failed, %.0fs total\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
