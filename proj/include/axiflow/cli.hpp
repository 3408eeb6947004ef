#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "axiflow/curvature_algebra.hpp"
#include "axiflow/errors.hpp"
#include "axiflow/monitors.hpp"
#include "axiflow/ovaloid.hpp"
#include "axiflow/solver.hpp"
#include "axiflow/speeds.hpp"

namespace axiflow::cli {

struct SpeedConfig {
  std::string kind = "mean-power";
  double alpha = 1.0;
  std::vector<double> coefficients;
};

struct SeedConfig {
  std::string shape = "sphere";  ///< sphere | spherocylinder
  double R = 1.0;
  double l = 4.0;
  double r = 1.0;
};

struct OvaloidConfig {
  std::vector<double> lengths{2.0, 4.0, 8.0};
  double window_lo = -2.0;
  double window_hi = -1.0;
  double convergence_time = -1.0;
  std::vector<double> blowdown_scales{1.0, 2.0, 4.0};
  double t_probe = -1.0;
  double normalize_tol = 1e-2;
  double round_eps = 0.05;
  std::optional<double> blowdown_l;  ///< defaults to the largest length
};

/// Everything one invocation needs. Parsed from a JSON document; keys not
/// listed here are rejected.
struct RunConfig {
  int n = 2;
  SpeedConfig speed;
  SeedConfig seed;
  int N = 128;
  StepControl control;
  StopConditions stop;
  std::string output = "axiflow-out";
  AuditTolerances tolerances;
  std::uint64_t rng_seed = 0x5eedULL;
  std::optional<std::string> record;  ///< run directory to audit instead of simulating
  AlgebraSuiteOptions algebra;
  OvaloidConfig ovaloid;
  int speed_samples = 2000;

  SpeedSpec make_speed() const;
  GeneratingCurve make_seed() const;
};

/// Defaults that differ from the library ones: a curvature cap of 1e3 (null in
/// the file lifts it) and a snapshot at every tenth checkpoint.
RunConfig default_config();

/// Throws ConfigError for unknown keys, wrong types and invalid values.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& config);

enum class Command { Simulate, Audit, Ovaloid, Blowdown, VerifyAlgebra, Speeds };
Command command_from_string(const std::string& name);
std::string to_string(Command command);

struct ExecOptions {
  bool strict = false;
  int jobs = 1;
  std::optional<std::string> out;  ///< beats AXIFLOW_OUT_DIR, which beats the config
};

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kCheckFailed = 3,  ///< strict mode: audit, verification or family failed
  kIo = 4,
  kDomain = 10,
  kNonPositive = 11,
  kBadParam = 12,
  kNoRoot = 13,
  kDegeneratePoint = 14,
  kOffLocus = 15,
  kDegenerateMesh = 16,
  kPastSingular = 17,
  kConeExit = 18,
  kNumericalBlowup = 19,
  kInsufficientData = 20,
  kNoEccentricTime = 21,
  kNotRound = 22,
};

int exit_code(const Error& error);

/// Output directory after applying the override order.
std::string output_dir(const RunConfig& config, const ExecOptions& options);

/// Runs one subcommand, writes its artifacts, logs a summary to `log`.
/// Library errors propagate; use exit_code() to map them.
int execute(const RunConfig& config, Command command, const ExecOptions& options,
            std::ostream& log);

/// Parses argv, runs, and maps every error to an exit status.
int cli_main(int argc, char** argv);

}  // namespace axiflow::cli
