#include "axiflow/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "axiflow/errors.hpp"
#include "axiflow/profile.hpp"
#include "axiflow/record.hpp"

namespace axiflow::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Reads the members of one JSON object and rejects whatever is left over.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("must be an object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    const auto it = node_.find(key);
    if (it == node_.end() || it->is_null()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      fail_key(key, "has the wrong type");
    }
  }

  template <typename T>
  void get(const std::string& key, std::optional<T>& out) {
    seen_.insert(key);
    const auto it = node_.find(key);
    if (it == node_.end() || it->is_null()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      fail_key(key, "has the wrong type");
    }
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    return has(key) ? &node_.at(key) : nullptr;
  }

  bool present(const std::string& key) const { return node_.contains(key); }

  bool has(const std::string& key) const {
    const auto it = node_.find(key);
    return it != node_.end() && !it->is_null();
  }

  std::optional<Section> child(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    return Section(node_.at(key), path_.empty() ? key : path_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, value] : node_.items())
      if (!seen_.count(key)) fail_key(key, "is not a known setting");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError((path_.empty() ? std::string("config") : path_) + " " + what);
  }
  [[noreturn]] void fail_key(const std::string& key, const std::string& what) const {
    throw ConfigError((path_.empty() ? key : path_ + "." + key) + " " + what);
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string format_seed(std::uint64_t seed) {
  std::ostringstream os;
  os << "0x" << std::hex << seed;
  return os.str();
}

std::uint64_t parse_seed(const json& node) {
  if (node.is_number_unsigned()) return node.get<std::uint64_t>();
  if (node.is_number_integer() && node.get<long long>() >= 0) return node.get<std::uint64_t>();
  if (node.is_string()) {
    try {
      std::size_t used = 0;
      const std::string s = node.get<std::string>();
      const std::uint64_t v = std::stoull(s, &used, 0);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("rng_seed must be a non-negative integer or an integer string");
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::ios_base::failure("write to " + path.string() + " failed");
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void write_curve(const fs::path& path, const GeneratingCurve& c) {
  std::ostringstream os;
  write_curve_csv(os, c);
  write_text(path, os.str());
}

// Validates by constructing, so a bad value surfaces as ConfigError before
// any compute starts.
template <typename F>
auto checked(const std::string& what, F&& make) {
  try {
    return make();
  } catch (const BadParam& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

}  // namespace

SpeedSpec RunConfig::make_speed() const {
  return checked("speed", [&] {
    return SpeedSpec::create(speed_kind_from_string(speed.kind), n, speed.alpha,
                             speed.coefficients);
  });
}

GeneratingCurve RunConfig::make_seed() const {
  return checked("seed", [&] {
    if (seed.shape == "sphere") return make_sphere(seed.R, N, n);
    return make_spherocylinder(seed.l, seed.r, N, n, control.angle_weight);
  });
}

RunConfig default_config() {
  RunConfig c;
  c.stop.max_curvature = 1e3;
  c.control.snapshot_every = 10;
  return c;
}

RunConfig parse_config(const json& doc) {
  RunConfig c = default_config();
  Section top(doc, "");

  top.get("n", c.n);
  if (auto s = top.child("speed")) {
    s->get("kind", c.speed.kind);
    s->get("alpha", c.speed.alpha);
    s->get("coefficients", c.speed.coefficients);
    if (s->has("n")) {
      int n = c.n;
      s->get("n", n);
      require(!top.has("n") || n == c.n, "speed.n disagrees with n");
      c.n = n;
    } else {
      s->get("n", c.n);
    }
    s->finish();
  }
  if (auto s = top.child("seed")) {
    s->get("shape", c.seed.shape);
    s->get("R", c.seed.R);
    s->get("l", c.seed.l);
    s->get("r", c.seed.r);
    s->finish();
  }
  top.get("N", c.N);
  if (auto s = top.child("step")) {
    std::optional<double> max_dt;
    s->get("cfl", c.control.cfl);
    s->get("max_dt", max_dt);
    if (max_dt) c.control.max_dt = *max_dt;
    s->get("resample_every", c.control.resample_every);
    s->get("angle_weight", c.control.angle_weight);
    s->get("rescale_trigger", c.control.rescale_trigger);
    s->get("rescale_target", c.control.rescale_target);
    s->get("checkpoint_every", c.control.checkpoint_every);
    s->get("cone_tol", c.control.cone_tol);
    s->finish();
  }
  top.get("dump_every", c.control.snapshot_every);
  if (auto s = top.child("stop")) {
    if (const json* kmax = s->raw("max_curvature")) {
      if (!kmax->is_number()) s->fail_key("max_curvature", "has the wrong type");
      c.stop.max_curvature = kmax->get<double>();
    } else if (s->present("max_curvature")) {
      c.stop.max_curvature = std::numeric_limits<double>::infinity();
    }
    s->get("roundness_eps", c.stop.roundness_eps);
    s->get("t_end", c.stop.t_end);
    s->get("max_steps", c.stop.max_steps);
    s->finish();
  }
  top.get("output", c.output);
  if (auto s = top.child("tolerances")) {
    auto& t = c.tolerances;
    s->get("cone", t.cone);
    s->get("pinching", t.pinching);
    s->get("monotone", t.monotone);
    s->get("sandwich", t.sandwich);
    s->get("speed_lower", t.speed_lower);
    s->get("comparability", t.comparability);
    s->get("halving", t.halving);
    s->finish();
  }
  if (const json* seed = top.raw("rng_seed")) c.rng_seed = parse_seed(*seed);
  top.get("record", c.record);
  const double cap = 1.0 / (c.n * (c.n - 1.0));
  c.algebra.sigma0 = c.n == 2 ? 0.2 : 0.8 * cap;
  if (auto s = top.child("algebra")) {
    auto& a = c.algebra;
    s->get("identity_samples", a.identity_samples);
    s->get("reaction_samples", a.reaction_samples);
    s->get("euler_samples", a.euler_samples);
    s->get("bracket_samples", a.bracket_samples);
    s->get("sign_samples", a.sign_samples);
    s->get("gamma0_samples", a.gamma0_samples);
    s->get("sigma0", a.sigma0);
    s->get("mh", a.mh);
    s->get("admissible_samples", a.admissible_samples);
    s->finish();
  }
  c.algebra.seed = c.rng_seed;
  if (auto s = top.child("ovaloid")) {
    auto& o = c.ovaloid;
    s->get("lengths", o.lengths);
    std::optional<std::vector<double>> window;
    s->get("window", window);
    if (window) {
      require(window->size() == 2, "ovaloid.window must be [lo, hi]");
      o.window_lo = (*window)[0];
      o.window_hi = (*window)[1];
    }
    s->get("convergence_time", o.convergence_time);
    s->get("blowdown_scales", o.blowdown_scales);
    s->get("t_probe", o.t_probe);
    s->get("normalize_tol", o.normalize_tol);
    s->get("round_eps", o.round_eps);
    s->get("blowdown_l", o.blowdown_l);
    s->finish();
  }
  top.get("speed_samples", c.speed_samples);
  top.finish();

  // Semantic checks, all before any compute.
  require(c.n >= 2, "n must be >= 2");
  require(c.speed.alpha >= 1.0, "speed.alpha: homogeneity must be >= 1");
  c.make_speed();
  require(c.seed.shape == "sphere" || c.seed.shape == "spherocylinder",
          "seed.shape must be 'sphere' or 'spherocylinder'");
  require(c.N >= 16, "N must be >= 16");
  c.make_seed();
  checked("step", [&] { validate(c.control); return 0; });
  checked("stop", [&] { validate(c.stop); return 0; });
  require(c.stop.max_steps > 0, "stop.max_steps must be positive");
  const auto& t = c.tolerances;
  for (double v : {t.cone, t.pinching, t.monotone, t.sandwich, t.speed_lower, t.comparability,
                   t.halving})
    require(v >= 0.0, "tolerances must be non-negative");
  require(!c.output.empty(), "output must not be empty");
  const auto& a = c.algebra;
  for (int v : {a.identity_samples, a.reaction_samples, a.euler_samples, a.bracket_samples,
                a.sign_samples, a.gamma0_samples, a.admissible_samples})
    require(v >= 0, "algebra sample counts must be non-negative");
  require(a.admissible_samples == 0 || a.admissible_samples >= 2,
          "algebra.admissible_samples must be 0 or >= 2");
  require(a.sigma0 > 0.0 && a.sigma0 < cap, "algebra.sigma0 must lie in (0, 1/(n(n-1)))");
  require(a.mh > 0.0, "algebra.mh must be positive");
  const auto& o = c.ovaloid;
  require(!o.lengths.empty(), "ovaloid.lengths must not be empty");
  for (std::size_t i = 0; i < o.lengths.size(); ++i) {
    require(o.lengths[i] >= 1.0, "ovaloid.lengths must all be >= 1");
    require(i == 0 || o.lengths[i] > o.lengths[i - 1], "ovaloid.lengths must be increasing");
  }
  require(o.window_lo < o.window_hi && o.window_hi < 0.0, "ovaloid.window must satisfy lo < hi < 0");
  require(o.convergence_time < 0.0, "ovaloid.convergence_time must be negative");
  require(o.t_probe < 0.0, "ovaloid.t_probe must be negative");
  for (double S : o.blowdown_scales) require(S > 0.0, "ovaloid.blowdown_scales must be positive");
  require(o.normalize_tol > 0.0, "ovaloid.normalize_tol must be positive");
  require(o.round_eps > 0.0, "ovaloid.round_eps must be positive");
  require(!o.blowdown_l || *o.blowdown_l >= 1.0, "ovaloid.blowdown_l must be >= 1");
  require(c.speed_samples >= 1, "speed_samples must be positive");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(is, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  json j;
  j["n"] = c.n;
  j["speed"] = {{"kind", c.speed.kind}, {"alpha", c.speed.alpha},
                {"coefficients", c.speed.coefficients}};
  j["seed"] = {{"shape", c.seed.shape}, {"R", c.seed.R}, {"l", c.seed.l}, {"r", c.seed.r}};
  j["N"] = c.N;
  j["step"] = {{"cfl", c.control.cfl},
               {"max_dt", number_or_null(c.control.max_dt)},
               {"resample_every", c.control.resample_every},
               {"angle_weight", c.control.angle_weight},
               {"rescale_trigger", c.control.rescale_trigger},
               {"rescale_target", c.control.rescale_target},
               {"checkpoint_every", c.control.checkpoint_every},
               {"cone_tol", c.control.cone_tol}};
  j["dump_every"] = c.control.snapshot_every;
  j["stop"] = {{"max_curvature", number_or_null(c.stop.max_curvature)},
               {"roundness_eps", optional_json(c.stop.roundness_eps)},
               {"t_end", optional_json(c.stop.t_end)},
               {"max_steps", c.stop.max_steps}};
  j["output"] = c.output;
  const auto& t = c.tolerances;
  j["tolerances"] = {{"cone", t.cone},         {"pinching", t.pinching},
                     {"monotone", t.monotone}, {"sandwich", t.sandwich},
                     {"speed_lower", t.speed_lower}, {"comparability", t.comparability},
                     {"halving", t.halving}};
  j["rng_seed"] = format_seed(c.rng_seed);
  j["record"] = optional_json(c.record);
  const auto& a = c.algebra;
  j["algebra"] = {{"identity_samples", a.identity_samples},
                  {"reaction_samples", a.reaction_samples},
                  {"euler_samples", a.euler_samples},
                  {"bracket_samples", a.bracket_samples},
                  {"sign_samples", a.sign_samples},
                  {"gamma0_samples", a.gamma0_samples},
                  {"sigma0", a.sigma0},
                  {"mh", a.mh},
                  {"admissible_samples", a.admissible_samples}};
  const auto& o = c.ovaloid;
  j["ovaloid"] = {{"lengths", o.lengths},
                  {"window", {o.window_lo, o.window_hi}},
                  {"convergence_time", o.convergence_time},
                  {"blowdown_scales", o.blowdown_scales},
                  {"t_probe", o.t_probe},
                  {"normalize_tol", o.normalize_tol},
                  {"round_eps", o.round_eps},
                  {"blowdown_l", optional_json(o.blowdown_l)}};
  j["speed_samples"] = c.speed_samples;
  return j;
}

Command command_from_string(const std::string& name) {
  static const std::map<std::string, Command> table{
      {"simulate", Command::Simulate},   {"audit", Command::Audit},
      {"ovaloid", Command::Ovaloid},     {"blowdown", Command::Blowdown},
      {"verify-algebra", Command::VerifyAlgebra}, {"speeds", Command::Speeds}};
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown subcommand '" + name + "'");
  return it->second;
}

std::string to_string(Command command) {
  switch (command) {
    case Command::Simulate: return "simulate";
    case Command::Audit: return "audit";
    case Command::Ovaloid: return "ovaloid";
    case Command::Blowdown: return "blowdown";
    case Command::VerifyAlgebra: return "verify-algebra";
    case Command::Speeds: return "speeds";
  }
  return "?";
}

int exit_code(const Error& e) {
  static const std::map<std::string, int> table{
      {"ConfigError", kConfig},         {"DomainError", kDomain},
      {"NonPositive", kNonPositive},    {"BadParam", kBadParam},
      {"NoRoot", kNoRoot},              {"DegeneratePoint", kDegeneratePoint},
      {"OffLocus", kOffLocus},          {"DegenerateMesh", kDegenerateMesh},
      {"PastSingular", kPastSingular},  {"ConeExit", kConeExit},
      {"NumericalBlowup", kNumericalBlowup}, {"InsufficientData", kInsufficientData},
      {"NoEccentricTime", kNoEccentricTime}, {"NotRound", kNotRound}};
  const auto it = table.find(e.code());
  return it == table.end() ? kInternal : it->second;
}

std::string output_dir(const RunConfig& config, const ExecOptions& options) {
  if (options.out) return *options.out;
  if (const char* env = std::getenv("AXIFLOW_OUT_DIR"); env && *env) return env;
  return config.output;
}

namespace {

json to_json(const SuiteResult& s) {
  return {{"name", s.name},
          {"samples", s.samples},
          {"violations", s.violations},
          {"worst", number_or_null(s.worst)},
          {"tolerance", s.tolerance}};
}

json to_json(const AlgebraReport& r, const AlgebraSuiteOptions& o) {
  json suites = json::array();
  for (const auto& s : r.suites) suites.push_back(to_json(s));
  json adm = {{"speed", r.admissible_speed},
              {"sigma0", o.sigma0},
              {"mh", o.mh},
              {"samples", o.admissible_samples},
              {"l", r.admissible.l},
              {"warning", r.admissible.warning},
              {"grid", r.admissible.grid},
              {"worst", json::array()},
              {"passes", json::array()}};
  for (std::size_t i = 0; i < r.admissible.grid.size(); ++i) {
    adm["worst"].push_back(number_or_null(r.admissible.worst[i]));
    adm["passes"].push_back(bool(r.admissible.passes[i]));
  }
  return {{"rng", {{"generator", "splitmix64-counter"},
                   {"seed", format_seed(r.seed)},
                   {"draws", r.draws}}},
          {"violations", r.violations()},
          {"suites", suites},
          {"find_admissible_l", adm}};
}

json to_json(const AssumptionReport& r) {
  return {{"samples", r.samples},
          {"symmetry_residual", r.symmetry_residual},
          {"min_scaled_value", r.min_scaled_value},
          {"monotonicity_margin", r.monotonicity_margin},
          {"homogeneity_residual", r.homogeneity_residual},
          {"normalization_residual", r.normalization_residual},
          {"symmetric", r.symmetric},
          {"positive", r.positive},
          {"monotone", r.monotone},
          {"homogeneous", r.homogeneous},
          {"normalized", r.normalized},
          {"failures", r.failures},
          {"pass", r.pass()}};
}

void save_record(const fs::path& dir, const RunRecord& record) {
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "run.jsonl");
    if (!os) throw std::ios_base::failure("cannot open " + (dir / "run.jsonl").string());
    write_jsonl(os, record);
    if (!os) throw std::ios_base::failure("write to " + (dir / "run.jsonl").string() + " failed");
  }
  write_snapshots((dir / "snapshots").string(), record);
}

RunRecord load_record(const fs::path& dir) {
  std::ifstream is(dir / "run.jsonl");
  if (!is) throw std::ios_base::failure("cannot read " + (dir / "run.jsonl").string());
  RunRecord record = read_jsonl(is);
  if (fs::is_directory(dir / "snapshots")) read_snapshots((dir / "snapshots").string(), record);
  return record;
}

RunRecord simulate(const RunConfig& c, const SpeedSpec& speed, const fs::path& out,
                   std::ostream& log) {
  const GeneratingCurve seed = c.make_seed();
  const RunRecord record = run(seed, speed, c.control, c.stop);
  save_record(out, record);
  write_curve(out / "initial_curve.csv", seed);
  for (auto it = record.checkpoints.rbegin(); it != record.checkpoints.rend(); ++it) {
    if (it->snapshot) {
      write_curve(out / "final_curve.csv", *it->snapshot);
      break;
    }
  }
  const Checkpoint& last = record.back();
  log << "simulate: " << record.checkpoints.size() << " checkpoints, " << last.step
      << " steps, t = " << std::setprecision(10) << last.t << ", a/b = " << last.ratio
      << ", terminal " << record.terminal_reason << "\n";
  return record;
}

FamilyOptions family_options(const RunConfig& c, int jobs) {
  FamilyOptions f;
  f.N = c.N;
  f.control = c.control;
  if (f.control.snapshot_every == 0) f.control.snapshot_every = 1;
  f.stop = c.stop;
  if (!f.stop.roundness_eps) f.stop.roundness_eps = c.ovaloid.round_eps / 2;
  f.tolerances = c.tolerances;
  f.normalize.tol = c.ovaloid.normalize_tol;
  f.normalize.round_eps = c.ovaloid.round_eps;
  f.jobs = jobs;
  f.window_lo = c.ovaloid.window_lo;
  f.window_hi = c.ovaloid.window_hi;
  f.convergence_time = c.ovaloid.convergence_time;
  f.blowdown_scales = c.ovaloid.blowdown_scales;
  f.t_probe = c.ovaloid.t_probe;
  return f;
}

void write_blowdown_csv(const fs::path& path, const std::vector<BlowdownSample>& samples) {
  std::ostringstream os;
  os << std::setprecision(17) << "S,time,mid_radius,cylinder_radius_ref,lambda_mid,mismatch\n";
  for (const auto& b : samples)
    os << b.S << ',' << b.time << ',' << b.mid_radius << ',' << b.cylinder_radius_ref << ','
       << b.lambda_mid << ',' << b.mismatch << '\n';
  write_text(path, os.str());
}

}  // namespace

int execute(const RunConfig& c, Command command, const ExecOptions& options, std::ostream& log) {
  if (options.jobs < 1) throw ConfigError("--jobs must be >= 1");
  const SpeedSpec speed = c.make_speed();
  const fs::path out = output_dir(c, options);
  fs::create_directories(out);
  write_json(out / "config.json", to_json(c));

  switch (command) {
    case Command::Simulate: {
      simulate(c, speed, out, log);
      return kOk;
    }
    case Command::Audit: {
      const RunRecord record = c.record ? load_record(*c.record) : simulate(c, speed, out, log);
      const AuditReport report = audit(record, speed, c.tolerances);
      json doc = axiflow::to_json(report);
      doc["terminal_reason"] = record.terminal_reason;
      doc["speed"] = speed.id();
      write_json(out / "audit.json", doc);
      for (const auto& chk : report.checks)
        log << "audit " << std::left << std::setw(20) << chk.name << (chk.pass ? "pass" : "FAIL")
            << (chk.evaluated ? "" : " (not evaluated)") << "  margin " << std::setprecision(4)
            << chk.worst_margin << "\n";
      return options.strict && !report.pass ? kCheckFailed : kOk;
    }
    case Command::Ovaloid: {
      const OvaloidFamily family =
          build_family(c.ovaloid.lengths, speed, family_options(c, options.jobs));
      write_json(out / "family.json", axiflow::to_json(family));
      write_family_plots((out / "plots").string(), family, c.ovaloid.convergence_time);
      for (const auto& m : family.members) {
        log << "ovaloid l = " << m.l << ": ";
        if (m.run)
          log << "T_l = " << std::setprecision(6) << m.run->T_l << ", audit "
              << (m.audit && m.audit->pass ? "pass" : "FAIL") << "\n";
        else
          log << "failed (" << m.error << ")\n";
      }
      if (!family.blowdown_error.empty()) log << "blowdown: " << family.blowdown_error << "\n";
      return options.strict && family.degraded ? kCheckFailed : kOk;
    }
    case Command::Blowdown: {
      const double l = c.ovaloid.blowdown_l.value_or(c.ovaloid.lengths.back());
      const FamilyOptions f = family_options(c, 1);
      const RunRecord raw =
          run(make_spherocylinder(l, 1.0, f.N, c.n, f.control.angle_weight), speed, f.control,
              f.stop);
      NormalizeOptions norm = f.normalize;
      norm.control = f.control;
      NormalizedRun member = normalize_run(raw, speed, norm);
      member.l = l;
      const auto samples = blowdown(member, speed, c.ovaloid.blowdown_scales, c.ovaloid.t_probe);
      write_blowdown_csv(out / "blowdown.csv", samples);
      for (const auto& b : samples)
        log << "blowdown S = " << b.S << ": mid radius " << std::setprecision(6) << b.mid_radius
            << ", reference " << b.cylinder_radius_ref << ", lambda " << b.lambda_mid << "\n";
      return kOk;
    }
    case Command::VerifyAlgebra: {
      const AlgebraReport report = run_algebra_suites(speed, c.algebra);
      write_json(out / "algebra.json", to_json(report, c.algebra));
      for (const auto& s : report.suites)
        log << "algebra " << std::left << std::setw(22) << s.name << s.violations << " of "
            << s.samples << " violate\n";
      log << "find_admissible_l: l* = " << report.admissible.l
          << (report.admissible.warning ? " (no grid value passes)" : "") << "\n";
      return options.strict && report.violations() > 0 ? kCheckFailed : kOk;
    }
    case Command::Speeds: {
      const AssumptionReport report = verify_assumptions(speed, c.n, c.speed_samples, c.rng_seed);
      json doc = {{"speed", speed.id()},
                  {"n", c.n},
                  {"alpha", speed.alpha()},
                  {"cone_admissible", speed.cone_admissible()},
                  {"rng_seed", format_seed(c.rng_seed)},
                  {"assumptions", to_json(report)}};
      const Comparability cmp = comparability_bounds(speed, 1001);
      doc["comparability"] = {{"m1", cmp.m1}, {"m2", cmp.m2}};
      try {
        doc["tso_constant"] = tso_constant(speed, c.n, 1001);
      } catch (const NonPositive&) {
        doc["tso_constant"] = nullptr;
      }
      write_json(out / "speeds.json", doc);
      log << "speeds " << speed.id() << ": " << (report.pass() ? "all assumptions hold" : "FAIL");
      for (const auto& f : report.failures) log << "\n  " << f;
      log << "\n";
      return options.strict && !report.pass() ? kCheckFailed : kOk;
    }
  }
  return kInternal;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Curvature flows of rotationally symmetric convex hypersurfaces"};
  app.require_subcommand(1);
  std::string config_path;
  ExecOptions options;
  std::string out;
  for (const char* name :
       {"simulate", "audit", "ovaloid", "blowdown", "verify-algebra", "speeds"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_flag("--strict", options.strict, "nonzero exit when a check fails");
    sub->add_option("--jobs", options.jobs, "worker threads for family builds");
    sub->add_option("--out", out, "output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  if (!out.empty()) options.out = out;
  try {
    const RunConfig config = load_config(config_path);
    return execute(config, command_from_string(app.get_subcommands().front()->get_name()),
                   options, std::cout);
  } catch (const Error& e) {
    std::cerr << "axiflow: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "axiflow: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "axiflow: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "axiflow: internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace axiflow::cli
