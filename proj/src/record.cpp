#include "axiflow/record.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "axiflow/errors.hpp"

namespace axiflow {

using nlohmann::json;

void RunRecord::validate() const {
  if (checkpoints.empty()) throw InsufficientData("run record has no checkpoints");
  for (std::size_t i = 1; i < checkpoints.size(); ++i)
    if (!(checkpoints[i].t > checkpoints[i - 1].t))
      throw InsufficientData("run record times are not strictly increasing at checkpoint " +
                             std::to_string(i));
}

bool RunRecord::covers(double t) const {
  bool below = false, above = false;
  for (const Checkpoint& c : checkpoints) {
    if (!c.snapshot) continue;
    below = below || c.t <= t;
    above = above || c.t >= t;
  }
  return below && above;
}

GeneratingCurve RunRecord::curve_at(double t) const {
  const Checkpoint* lo = nullptr;
  const Checkpoint* hi = nullptr;
  for (const Checkpoint& c : checkpoints) {
    if (!c.snapshot) continue;
    if (c.t <= t) lo = &c;
    if (c.t >= t) {
      hi = &c;
      break;
    }
  }
  if (!lo || !hi) {
    std::ostringstream os;
    os << "no snapshots bracket t = " << t;
    throw InsufficientData(os.str());
  }
  if (lo == hi || hi->t == lo->t) return *lo->snapshot;
  const GeneratingCurve& a = *lo->snapshot;
  const GeneratingCurve& b = *hi->snapshot;
  if (a.nodes() != b.nodes()) throw InsufficientData("bracketing snapshots differ in size");
  const double w = (t - lo->t) / (hi->t - lo->t);
  GeneratingCurve c = a;
  c.x = (1 - w) * a.x + w * b.x;
  c.u = (1 - w) * a.u + w * b.u;
  return c;
}

namespace {

json to_json(const Checkpoint& c) {
  return json{{"type", "checkpoint"},
              {"t", c.t},
              {"step", c.step},
              {"event", c.event},
              {"a", c.a},
              {"b", c.b},
              {"ratio", c.ratio},
              {"center", c.center},
              {"min_lambda", c.min_lambda},
              {"max_lambda", c.max_lambda},
              {"min_mu", c.min_mu},
              {"max_mu", c.max_mu},
              {"mu_ratio", c.mu_ratio},
              {"min_mu_minus_lambda", c.min_mu_minus_lambda},
              {"maxH", c.max_h},
              {"minF", c.min_f},
              {"maxF", c.max_f},
              {"max_curvature", c.max_curvature},
              {"z_margin", c.z_margin},
              {"s_plus", c.s_plus},
              {"s_minus", c.s_minus},
              {"lambda_total", c.lambda_total},
              {"has_snapshot", c.snapshot.has_value()}};
}

Checkpoint checkpoint_from_json(const json& j) {
  Checkpoint c;
  c.t = j.at("t").get<double>();
  c.step = j.at("step").get<long>();
  c.event = j.at("event").get<std::string>();
  c.a = j.at("a").get<double>();
  c.b = j.at("b").get<double>();
  c.ratio = j.at("ratio").get<double>();
  c.center = j.at("center").get<double>();
  c.min_lambda = j.at("min_lambda").get<double>();
  c.max_lambda = j.at("max_lambda").get<double>();
  c.min_mu = j.at("min_mu").get<double>();
  c.max_mu = j.at("max_mu").get<double>();
  c.mu_ratio = j.at("mu_ratio").get<double>();
  c.min_mu_minus_lambda = j.at("min_mu_minus_lambda").get<double>();
  c.max_h = j.at("maxH").get<double>();
  c.min_f = j.at("minF").get<double>();
  c.max_f = j.at("maxF").get<double>();
  c.max_curvature = j.at("max_curvature").get<double>();
  c.z_margin = j.at("z_margin").get<double>();
  c.s_plus = j.at("s_plus").get<double>();
  c.s_minus = j.at("s_minus").get<double>();
  c.lambda_total = j.at("lambda_total").get<double>();
  return c;
}

}  // namespace

void write_jsonl(std::ostream& os, const RunRecord& r) {
  os << json{{"type", "header"},
             {"speed_id", r.speed_id},
             {"n", r.n},
             {"alpha", r.alpha},
             {"nodes", r.nodes},
             {"normalized", r.normalized}}
            .dump()
     << '\n';
  for (const Checkpoint& c : r.checkpoints) os << to_json(c).dump() << '\n';
  os << json{{"type", "terminal"}, {"terminal_reason", r.terminal_reason}}.dump() << '\n';
}

RunRecord read_jsonl(std::istream& is) {
  RunRecord r;
  std::string line;
  bool header = false;
  try {
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        r.speed_id = j.at("speed_id").get<std::string>();
        r.n = j.at("n").get<int>();
        r.alpha = j.at("alpha").get<double>();
        r.nodes = j.at("nodes").get<int>();
        r.normalized = j.at("normalized").get<bool>();
        header = true;
      } else if (type == "checkpoint") {
        r.checkpoints.push_back(checkpoint_from_json(j));
      } else if (type == "terminal") {
        r.terminal_reason = j.at("terminal_reason").get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    throw InsufficientData(std::string("malformed run record: ") + e.what());
  }
  if (!header) throw InsufficientData("run record has no header line");
  return r;
}

int write_snapshots(const std::string& dir, const RunRecord& r) {
  std::filesystem::create_directories(dir);
  int count = 0;
  for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
    if (!r.checkpoints[i].snapshot) continue;
    std::ofstream out(std::filesystem::path(dir) / ("snapshot_" + std::to_string(i) + ".csv"));
    write_curve_csv(out, *r.checkpoints[i].snapshot);
    ++count;
  }
  return count;
}

int read_snapshots(const std::string& dir, RunRecord& r) {
  int count = 0;
  for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
    const auto path = std::filesystem::path(dir) / ("snapshot_" + std::to_string(i) + ".csv");
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path);
    r.checkpoints[i].snapshot = read_curve_csv(in, r.n);
    ++count;
  }
  return count;
}

}  // namespace axiflow
