#pragma once

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace adastep {

inline constexpr const char *kTraceSchema = "adastep-trace/1";

/// One recorded iteration. Counters are cumulative at the time of recording.
struct TraceRecord {
  std::uint64_t t = 0;
  double epoch = 0.0;          // gradient cost / n
  double suboptimality = 0.0;  // f(x_t) - f*
  double suboptimality_avg = 0.0;  // f(xbar_t) - f*
  double eta = 0.0;            // stepsize of the latest step (0 at t = 0)
  double grad_norm_sq = 0.0;   // squared norm of that step's gradient estimate
  double dist_sq = 0.0;        // ||x_t - x*||^2
  std::uint64_t stochastic_grad_evals = 0;
  std::uint64_t full_grad_evals = 0;
  std::uint64_t function_evals = 0;
  std::uint64_t probes = 0;     // line-search probes so far
  std::uint64_t refreshes = 0;  // snapshot refreshes so far

  bool operator==(const TraceRecord &) const = default;
};

struct Trace {
  /// Schema, config echo, resolved constants, problem hash, reference optimum.
  nlohmann::json header;
  std::vector<TraceRecord> records;
  /// "ok", or "aborted: <reason>" for a run cut short by a numeric failure.
  std::string status = "ok";
  /// Last iterate of the run. Kept in memory only; not part of the file format.
  std::vector<double> final_x;

  bool ok() const { return status == "ok"; }
};

/// Column order of the record table.
extern const char *const kTraceColumns;

std::string format_trace(const Trace &trace);
Trace parse_trace(std::istream &in);
Trace read_trace_file(const std::string &path);

/// Applies the ADASTEP_OUTPUT_DIR override to relative paths.
std::string resolve_output_path(const std::string &path);

/// Writes via a temporary sibling file and rename.
void write_file_atomic(const std::string &path, const std::string &content);

}  // namespace adastep
