#pragma once

#include "adastep/rng.hpp"
#include "adastep/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adastep {

/// Sorted set of distinct component indices drawn for one iteration.
using Batch = std::vector<Index>;

/// Best known optimum of the full objective, used for suboptimality reporting.
struct ReferenceOptimum {
  double f_star = 0.0;
  Vec x_star;
  std::string method;
};

/// f(x) = (1/n) sum_i f_i(x) with per-component value and gradient access.
///
/// Implementations are immutable after construction and may be shared
/// read-only across concurrent runs.
class FiniteSumProblem {
 public:
  virtual ~FiniteSumProblem() = default;

  virtual Index size() const = 0;
  virtual Index dim() const = 0;

  virtual double component_value(Index i, const Vec &x) const = 0;
  /// out += scale * grad f_i(x)
  virtual void add_component_gradient(Index i, const Vec &x, double scale, Vec &out) const = 0;

  /// A lower bound on inf of the batch average; 0 for non-negative losses.
  virtual double batch_lower_bound(std::span<const Index> batch) const = 0;

  /// The infimum of the batch average, when the problem can compute it.
  virtual std::optional<double> batch_min(std::span<const Index> /*batch*/) const {
    return std::nullopt;
  }

  /// A smoothness constant valid for every f_i (and thus every batch average).
  virtual std::optional<double> smoothness() const { return std::nullopt; }

  /// A strong-convexity constant valid for every f_i, when positive.
  virtual std::optional<double> strong_convexity() const { return std::nullopt; }

  virtual ReferenceOptimum reference_optimum() const = 0;

  /// Short content digest identifying the instance.
  virtual std::string content_hash() const = 0;
  virtual std::string kind() const = 0;

  // Uncounted evaluations for reporting and tests.
  double batch_value(std::span<const Index> batch, const Vec &x) const;
  Vec batch_gradient(std::span<const Index> batch, const Vec &x) const;
  double objective(const Vec &x) const;
  Vec objective_gradient(const Vec &x) const;
};

struct OracleCounters {
  std::uint64_t stochastic_grad_evals = 0;
  std::uint64_t full_grad_evals = 0;
  std::uint64_t function_evals = 0;

  /// Total gradient cost in component-gradient units.
  std::uint64_t gradient_cost(Index n) const { return stochastic_grad_evals + n * full_grad_evals; }
};

/// Full gradient plus the per-component gradients that formed it (column i = grad f_i).
struct ComponentGradients {
  Vec mean;
  Mat columns;

  Vec batch_mean(std::span<const Index> batch) const;
};

/// Counting, finiteness-checking front end over a problem. Owned by one run.
class Oracle {
 public:
  explicit Oracle(const FiniteSumProblem &problem) : problem_(&problem) {}

  const FiniteSumProblem &problem() const { return *problem_; }
  const OracleCounters &counters() const { return counters_; }

  /// Batch average value; counts one function evaluation.
  double value(std::span<const Index> batch, const Vec &x);
  /// Batch average gradient; counts |batch| stochastic gradients.
  Vec gradient(std::span<const Index> batch, const Vec &x);
  /// Full gradient; counts one full pass.
  Vec full_gradient(const Vec &x);
  /// Full gradient keeping every component gradient; counts one full pass.
  ComponentGradients full_gradient_components(const Vec &x);

 private:
  void check(const Vec &x) const;

  const FiniteSumProblem *problem_;
  OracleCounters counters_;
};

/// Draws B distinct indices uniformly from [0, n) per call.
class Sampler {
 public:
  Sampler(Index n, Index batch_size, std::uint64_t seed);

  Batch sample();

  Index n() const { return n_; }
  Index batch_size() const { return batch_size_; }

 private:
  Index n_;
  Index batch_size_;
  Rng rng_;
};

bool all_finite(const Vec &v);

}  // namespace adastep
