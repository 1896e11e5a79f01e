#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdpiag {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemConfig {
  std::string family = "quadratic-quadratic";  // or "lasso-dual"
  int d1 = 10;
  int d2 = 10;
  int N = 5;
  std::uint64_t seed = 1;
  double gamma = 1.0;           // quadratic-quadratic
  double conditioning = 10.0;   // quadratic-quadratic
  double lambda = 0.5;          // lasso-dual
  int rows_per_block = 4;       // lasso-dual

  bool operator==(const ProblemConfig&) const = default;
};

struct ScheduleConfig {
  std::string kind = "cyclic";  // cyclic | random_bounded | constant
  int T = 0;
  double p = 0.5;
  std::optional<std::uint64_t> seed;  // default: problem.seed + 1

  bool operator==(const ScheduleConfig&) const = default;
};

struct SolverConfig {
  std::string variant = "thm1";  // thm1 | thm2 | thm3
  std::optional<double> sigma;   // nullopt = auto
  std::optional<double> tau;     // nullopt = auto
  std::optional<double> theta;   // nullopt = auto (thm2 only)
  double step_ratio = 1.0;       // sigma : tau when auto
  std::int64_t max_iters = 1000;
  bool force = false;  // run despite a failed certificate
  ScheduleConfig schedule;

  bool operator==(const SolverConfig&) const = default;
};

struct AnalysisConfig {
  std::vector<std::int64_t> gap_checkpoints = {10, 100, 1000};
  std::optional<double> box_halfwidth;  // nullopt = auto
  std::vector<std::string> monitors = {"auto"};
  double convergence_tol = 1e-6;

  bool operator==(const AnalysisConfig&) const = default;
};

struct OutputConfig {
  std::string trace_path = "trace.csv";
  std::string summary_path = "summary.json";
  std::string plotdata_path = "plotdata.dat";
  bool timing = false;  // wall_ms column; makes trace files irreproducible

  bool operator==(const OutputConfig&) const = default;
};

struct ExperimentConfig {
  ProblemConfig problem;
  SolverConfig solver;
  AnalysisConfig analysis;
  OutputConfig output;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the canonical "section.key = value" text (comments start with '#').
/// A leading '{' switches to the JSON encoding of the same schema. Unknown
/// keys and out-of-range values raise ConfigError naming the key and line.
ExperimentConfig parse_config(const std::string& text);

/// Canonical serialization: every key, fixed order, 17-digit doubles.
/// parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace pdpiag
