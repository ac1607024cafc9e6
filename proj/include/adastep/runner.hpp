#pragma once

#include "adastep/config.hpp"
#include "adastep/linesearch.hpp"
#include "adastep/trace.hpp"

#include <functional>
#include <limits>
#include <memory>

namespace adastep {

/// Readings of one iteration, handed to RunOptions::observer before the update.
struct IterationInfo {
  std::uint64_t t = 0;
  const Batch *batch = nullptr;
  const Vec *x = nullptr;      // x_t
  double value = 0.0;          // f_B(x_t), or F(x_t) for variance-reduced runs
  double lower_bound = 0.0;    // bound fed to the stepsize rule
  double grad_sq = 0.0;        // squared norm of the gradient estimate
  double eta = 0.0;
  LineSearchResult search;     // gamma = 0 when no line search ran
  /// AdaSPS/AdaSLS family only: accumulator including this step, and c_p / c_l.
  double accumulator = std::numeric_limits<double>::quiet_NaN();
  double constant = std::numeric_limits<double>::quiet_NaN();
  bool refreshed = false;
};

struct RunOptions {
  /// Prebuilt problem; built from the config when null.
  std::shared_ptr<const FiniteSumProblem> problem;
  /// Directory relative data paths are resolved against.
  std::string base_dir;
  std::function<void(const IterationInfo &)> observer;
  /// Stepsize monotonicity and smoothness sandwich checks for AdaSPS/AdaSLS.
  bool online_checks = true;
};

/// Executes one configured run until the gradient budget is spent.
///
/// Numeric failures (non-finite oracle output, broken invariants, a stale
/// reference optimum) end the run early: the returned trace keeps every record
/// taken so far and carries an "aborted: ..." status. Config errors throw.
Trace run_experiment(const ExperimentConfig &config, const RunOptions &options = {});

/// Relative tolerance for the online stepsize sandwich checks.
inline constexpr double kSandwichSlack = 1e-9;
/// Suboptimality below -kSuboptimalitySlack means the reference optimum is stale.
inline constexpr double kSuboptimalitySlack = 1e-9;

}  // namespace adastep
