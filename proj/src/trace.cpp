#include "pdpiag/trace.hpp"

#include <cmath>
#include <cstdio>

namespace pdpiag {

const TraceRecord& ConvergenceTrace::at(std::int64_t k) const {
  if (k < 0 || static_cast<std::size_t>(k) >= records.size()) {
    throw std::invalid_argument("ConvergenceTrace::at: iteration out of range");
  }
  const TraceRecord& rec = records[static_cast<std::size_t>(k)];
  if (rec.k != k) throw std::logic_error("ConvergenceTrace::at: records out of order");
  return rec;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void append_field(std::string& out, double v) {
  out.push_back(',');
  if (!std::isnan(v)) out += format_double(v);
}

}  // namespace

std::string trace_to_csv(const ConvergenceTrace& trace) {
  std::string out = "k,dist_x,dist_y,V_k,gap,gap_bound,thm_bound,wall_ms\n";
  for (const auto& rec : trace.records) {
    out += std::to_string(rec.k);
    append_field(out, rec.dist_x);
    append_field(out, rec.dist_y);
    append_field(out, rec.V);
    append_field(out, rec.gap);
    append_field(out, rec.gap_bound);
    append_field(out, rec.thm_bound);
    append_field(out, rec.wall_ms);
    out.push_back('\n');
  }
  return out;
}

}  // namespace pdpiag
