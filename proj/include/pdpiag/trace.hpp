#pragma once

#include "pdpiag/certificates.hpp"
#include "pdpiag/problem.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pdpiag {

/// One solver iteration as recorded. x, y, the aggregate g_k and the delay
/// vector are always present; the analysis columns stay NaN until annotated
/// and serialize as empty CSV fields.
struct TraceRecord {
  std::int64_t k = 0;
  Vector x;
  Vector y;
  Vector aggregate;                 // g_k backing the step taken from this state
  std::vector<std::int64_t> delays;  // tau_k^i = k - stamp_i
  double dist_x = std::numeric_limits<double>::quiet_NaN();
  double dist_y = std::numeric_limits<double>::quiet_NaN();
  double V = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double gap_bound = std::numeric_limits<double>::quiet_NaN();
  double thm_bound = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceTrace {
  std::string config_echo;  // canonical config text, when driven by the CLI
  std::uint64_t seed = 0;
  std::optional<StepSizeCertificate> certificate;
  std::string termination = "completed";  // completed | diverged | monitor_stop
  std::vector<TraceRecord> records;

  std::int64_t iterations() const {
    return records.empty() ? 0 : records.back().k;
  }
  const TraceRecord& at(std::int64_t k) const;
};

/// CSV columns: k,dist_x,dist_y,V_k,gap,gap_bound,thm_bound,wall_ms.
/// NaN fields are emitted empty. Doubles use 17 significant digits so the
/// file is a faithful, reproducible image of the run.
std::string trace_to_csv(const ConvergenceTrace& trace);

/// Deterministic double formatting shared by all emitters ("%.17g").
std::string format_double(double v);

}  // namespace pdpiag
