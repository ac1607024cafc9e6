#pragma once

#include "adastep/libsvm.hpp"
#include "adastep/problem.hpp"

#include <memory>

namespace adastep {

/// f_i(x) = log(1 + exp(-y_i a_i^T x)) + (1/2n)||x||^2.
///
/// Every f_i is non-negative, so the lower bound is 0. The reference optimum
/// comes from a damped Newton method on the full objective, run until the
/// full-gradient norm is at most 1e-10, and is cached per dataset hash.
class LogisticRegressionProblem final : public FiniteSumProblem {
 public:
  explicit LogisticRegressionProblem(SparseDataset data);

  Index size() const override { return data_.rows(); }
  Index dim() const override { return data_.dim; }

  double component_value(Index i, const Vec &x) const override;
  void add_component_gradient(Index i, const Vec &x, double scale, Vec &out) const override;

  double batch_lower_bound(std::span<const Index>) const override { return 0.0; }
  /// Numerical (Newton) minimum of the batch average.
  std::optional<double> batch_min(std::span<const Index> batch) const override;
  std::optional<double> smoothness() const override { return smoothness_; }
  std::optional<double> strong_convexity() const override { return 2.0 * reg_; }
  ReferenceOptimum reference_optimum() const override;
  std::string content_hash() const override { return hash_; }
  std::string kind() const override { return "logistic_regression"; }

  const SparseDataset &data() const { return data_; }
  /// Coefficient on ||x||^2 in each f_i, i.e. 1/(2n).
  double regularization() const { return reg_; }

 private:
  SparseDataset data_;
  double reg_;
  double smoothness_;
  std::string hash_;
};

/// Numerically stable log(1 + exp(z)).
double softplus(double z);
/// Numerically stable 1 / (1 + exp(-z)).
double sigmoid(double z);

struct NewtonResult {
  Vec x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
};

/// Minimizes (1/|rows|) sum_{i in rows} softplus(-y_i a_i^T x) + reg ||x||^2 by damped Newton.
NewtonResult logistic_newton(const SparseDataset &data, std::span<const Index> rows, double reg,
                             double grad_tol);

}  // namespace adastep
