#pragma once

#include "adastep/trace.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace adastep {

/// Traces that cannot be aligned record by record.
class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Aggregate { none, mean_std };

Aggregate aggregate_from_string(const std::string &s);

struct LabeledTrace {
  std::string algorithm;
  std::uint64_t seed = 0;
  Trace trace;
};

/// Labels a trace with the algorithm name and seed from its header.
LabeledTrace label_trace(Trace trace);

/// Tidy CSV for plotting.
///
/// none:     algorithm,seed,t,epoch,suboptimality,suboptimality_avg,eta
///           (one row per record, input order)
/// mean_std: algorithm,epoch,seeds,suboptimality_mean,suboptimality_std,
///           suboptimality_avg_mean,suboptimality_avg_std,eta_mean,eta_std
///           (population std over the traces of each algorithm)
///
/// Traces of one algorithm are aligned record by record. They must share a
/// cadence, a record count and, per record, the iteration (fixed cadence) or
/// the whole epoch (per-epoch cadence); otherwise AlignmentError is thrown.
std::string export_plot_data(const std::vector<LabeledTrace> &traces, Aggregate aggregate);

}  // namespace adastep
