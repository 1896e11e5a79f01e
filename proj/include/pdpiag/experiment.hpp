#pragma once

#include "pdpiag/analysis.hpp"
#include "pdpiag/catalog.hpp"
#include "pdpiag/certificates.hpp"
#include "pdpiag/config.hpp"
#include "pdpiag/solver.hpp"
#include "pdpiag/trace.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace pdpiag {

// Exit-status contract shared by the library drivers and the CLI.
inline constexpr int kExitPass = 0;
inline constexpr int kExitVerifyFail = 1;  // certificate or monitor failed
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitDiverged = 3;
inline constexpr int kExitParseError = 4;

SaddleProblem build_problem(const ProblemConfig& config);
DelaySchedule build_schedule(const ScheduleConfig& config, std::uint64_t default_seed);

/// Resolved step sizes with their certificate; theta present for thm2.
struct StepSelection {
  double sigma = 0.0;
  double tau = 0.0;
  std::optional<double> theta;
  StepSizeCertificate certificate;
  bool auto_selected = false;
};

/// Applies auto_stepsize when sigma/tau are unset, otherwise certifies the
/// explicit values against the variant's conditions.
StepSelection select_steps(const ExperimentConfig& config, const SaddleProblem& problem,
                           int effective_T);

struct ExperimentResult {
  int exit_code = kExitPass;
  ExperimentConfig config;
  ConvergenceTrace trace;
  nlohmann::ordered_json summary;
  std::vector<MonitorReport> monitor_reports;
  std::vector<GapSeries> gap_series;
  std::optional<SaddleCertificate> saddle;
};

/// Full pipeline: build, certify, run, monitor, and write trace.csv,
/// summary.json and plotdata under out_dir (atomically). All error exits are
/// reported through exit_code; only I/O failures throw.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir);

/// Certificate evaluation without running the solver; the text is the
/// printable condition table.
struct CertifyResult {
  int exit_code = kExitPass;
  StepSizeCertificate certificate;
  std::string text;
};

CertifyResult certify(const ExperimentConfig& config);

struct SweepRow {
  double value = 0.0;
  int exit_code = 0;
  bool certified = false;
  double sigma = 0.0;
  double tau = 0.0;
  double theta = std::numeric_limits<double>::quiet_NaN();
  double min_slack = std::numeric_limits<double>::quiet_NaN();
  double final_dist_x = std::numeric_limits<double>::quiet_NaN();
  double final_dist_y = std::numeric_limits<double>::quiet_NaN();
  double final_primal_residual = std::numeric_limits<double>::quiet_NaN();
  double final_dual_residual = std::numeric_limits<double>::quiet_NaN();
  double empirical_rate = std::numeric_limits<double>::quiet_NaN();
  std::int64_t iterations = 0;
  std::string termination;
};

struct SweepResult {
  std::string axis;
  std::vector<SweepRow> rows;
  std::string csv_path;
};

/// Known sweep axes: T, sigma, tau, theta, N, max_iters, gamma, lambda,
/// conditioning, p, seed.
ExperimentConfig apply_axis_value(const ExperimentConfig& base, const std::string& axis,
                                  double value);

/// One experiment per value, each in its own subdirectory of out_dir; rows
/// collated in value order into sweep_<axis>.csv. Runs execute concurrently
/// up to `workers` (0 = hardware concurrency); each run is independent and
/// deterministic. Per-row failures are recorded, the sweep continues.
SweepResult sweep(const ExperimentConfig& base, const std::string& axis,
                  const std::vector<double>& values, const std::string& out_dir, int workers = 0);

/// Restricted gap at an explicit point, with the same box policy as
/// run_experiment.
struct GapAtResult {
  GapResult gap;
  BoxSet B1;
  BoxSet B2;
};

GapAtResult gap_at(const ExperimentConfig& config, const Vector& x, const Vector& y);

/// write-temp-then-rename
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace pdpiag
