#pragma once

#include "adastep/problem.hpp"
#include "adastep/trace.hpp"

#include <json.hpp>

#include <string>

namespace adastep {

/// Problem- and run-level constants that enter the convergence bounds.
struct DiagnosticsReport {
  double sigma_fB = 0.0;
  double err_fB = 0.0;
  /// True when batch expectations were sampled rather than enumerated.
  bool sampled = false;

  double smoothness = 0.0;
  bool smoothness_estimate = false;

  /// "tau_p", "tau_l", "tau_vr_p", "tau_vr_l" or "none".
  std::string tau_kind = "none";
  double tau = 0.0;
  double diameter_sq = 0.0;
  /// "ball", "dmax" or "empirical".
  std::string diameter_source;
  std::uint64_t iterations = 0;
  /// Right-hand side of the averaged-iterate bound at T = iterations.
  double averaged_bound = 0.0;

  bool has_dmax = false;
  double dmax_bound = 0.0;
  double sigma_max = 0.0;
  double max_dist_sq = 0.0;
  bool containment_checked = false;
  bool containment_holds = true;

  nlohmann::json to_json() const;
};

/// Evaluates the diagnostics for a finished run on `problem` with batch size B.
/// The trace header supplies the algorithm, resolved constants and projection.
DiagnosticsReport compute_diagnostics(const FiniteSumProblem &problem, Index batch_size, const Trace &trace,
                                      std::uint64_t sample_count = 2000, std::uint64_t seed = 0);

}  // namespace adastep
