#pragma once

#include "adastep/problem.hpp"
#include "adastep/projection.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace adastep {

inline constexpr const char *kConfigSchema = "adastep-config/1";

/// Every algorithm the runner knows.
enum class Algorithm {
  sgd,
  sps,
  sps_max,
  decsps,
  adasps,
  adasls,
  sls,
  adagrad_norm,
  adasps_dl,
  adasvrps,
  adasvrls,
  svrg,
};

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string &s);
bool is_variance_reduced(Algorithm a);

/// One fully specified run. Parsing fills every default so that the echoed
/// config in a trace header reproduces the run exactly.
struct ExperimentConfig {
  /// problem: {"type": "quadratic", regime, interpolated, n, d, seed, mask_p, lower_bound}
  ///        | {"type": "quadratic_file", path, lower_bound}
  ///        | {"type": "libsvm", path, max_rows, negative_labels, positive_labels}
  nlohmann::json problem;
  Algorithm algorithm = Algorithm::adasps;
  /// Algorithm hyperparameters with defaults filled in.
  nlohmann::json params;
  Index batch_size = 1;
  /// {"epochs": e} or {"grad_evals": g}, both in component-gradient units.
  nlohmann::json budget;
  std::uint64_t seed = 0;
  /// {"kind": "auto"}, {"kind": "unconstrained"} or
  /// {"kind": "ball", "radius": r, "center": "origin" | "x_star"}.
  /// auto is unconstrained for interpolated quadratics and a radius-100 ball
  /// around the origin otherwise.
  nlohmann::json projection;
  /// Record every k-th iteration; 0 records once per epoch-equivalent.
  std::uint64_t trace_every = 0;
  std::string output;

  nlohmann::json to_json() const;
};

/// Validates and normalizes a config document. Unknown keys are errors.
ExperimentConfig parse_config(const nlohmann::json &doc);
ExperimentConfig load_config(const std::string &path);

/// Fills algorithm defaults and rejects unknown hyperparameters.
nlohmann::json normalize_params(Algorithm algorithm, const nlohmann::json &given);

/// Builds the problem described by a problem block; defaults are filled in.
/// Relative paths are resolved against `base_dir` when non-empty.
std::shared_ptr<const FiniteSumProblem> build_problem(const nlohmann::json &problem,
                                                      const std::string &base_dir = "");

/// Resolves the projection block, including "auto", for a built problem.
nlohmann::json resolve_projection(const nlohmann::json &projection, const FiniteSumProblem &problem);
ProjectionDomain build_projection(const nlohmann::json &resolved, const FiniteSumProblem &problem);

/// Budget in component-gradient evaluations for a problem with n components.
std::uint64_t budget_limit(const nlohmann::json &budget, Index n);

}  // namespace adastep
