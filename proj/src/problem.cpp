#include "adastep/problem.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace adastep {

double FiniteSumProblem::batch_value(std::span<const Index> batch, const Vec &x) const {
  double sum = 0.0;
  for (Index i : batch) sum += component_value(i, x);
  return sum / static_cast<double>(batch.size());
}

Vec FiniteSumProblem::batch_gradient(std::span<const Index> batch, const Vec &x) const {
  Vec g = Vec::Zero(dim());
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (Index i : batch) add_component_gradient(i, x, scale, g);
  return g;
}

double FiniteSumProblem::objective(const Vec &x) const {
  double sum = 0.0;
  for (Index i = 0; i < size(); ++i) sum += component_value(i, x);
  return sum / static_cast<double>(size());
}

Vec FiniteSumProblem::objective_gradient(const Vec &x) const {
  Vec g = Vec::Zero(dim());
  const double scale = 1.0 / static_cast<double>(size());
  for (Index i = 0; i < size(); ++i) add_component_gradient(i, x, scale, g);
  return g;
}

Vec ComponentGradients::batch_mean(std::span<const Index> batch) const {
  Vec g = Vec::Zero(columns.rows());
  for (Index i : batch) g += columns.col(static_cast<Eigen::Index>(i));
  return g / static_cast<double>(batch.size());
}

bool all_finite(const Vec &v) { return v.allFinite(); }

void Oracle::check(const Vec &x) const {
  if (static_cast<Index>(x.size()) != problem_->dim())
    throw std::invalid_argument("oracle: dimension mismatch (got " + std::to_string(x.size()) +
                                ", expected " + std::to_string(problem_->dim()) + ")");
}

double Oracle::value(std::span<const Index> batch, const Vec &x) {
  check(x);
  ++counters_.function_evals;
  const double v = problem_->batch_value(batch, x);
  if (!std::isfinite(v)) throw NumericError("oracle: non-finite minibatch value");
  return v;
}

Vec Oracle::gradient(std::span<const Index> batch, const Vec &x) {
  check(x);
  counters_.stochastic_grad_evals += batch.size();
  Vec g = problem_->batch_gradient(batch, x);
  if (!g.allFinite()) throw NumericError("oracle: non-finite minibatch gradient");
  return g;
}

Vec Oracle::full_gradient(const Vec &x) {
  check(x);
  ++counters_.full_grad_evals;
  Vec g = problem_->objective_gradient(x);
  if (!g.allFinite()) throw NumericError("oracle: non-finite full gradient");
  return g;
}

ComponentGradients Oracle::full_gradient_components(const Vec &x) {
  check(x);
  ++counters_.full_grad_evals;
  const auto n = static_cast<Eigen::Index>(problem_->size());
  const auto d = static_cast<Eigen::Index>(problem_->dim());
  ComponentGradients out{Vec::Zero(d), Mat::Zero(d, n)};
  Vec gi(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    gi.setZero();
    problem_->add_component_gradient(static_cast<Index>(i), x, 1.0, gi);
    out.columns.col(i) = gi;
    out.mean += gi;
  }
  out.mean /= static_cast<double>(n);
  if (!out.columns.allFinite()) throw NumericError("oracle: non-finite full gradient");
  return out;
}

Sampler::Sampler(Index n, Index batch_size, std::uint64_t seed)
    : n_(n), batch_size_(batch_size), rng_(seed) {
  if (batch_size < 1 || batch_size > n)
    throw ConfigError("batch size must satisfy 1 <= B <= n (B=" + std::to_string(batch_size) +
                      ", n=" + std::to_string(n) + ")");
}

Batch Sampler::sample() {
  // Floyd's subset sampling: uniform over all size-B subsets, B draws.
  std::set<Index> chosen;
  for (Index j = n_ - batch_size_; j < n_; ++j) {
    const Index t = static_cast<Index>(rng_.uniform_index(j + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return Batch(chosen.begin(), chosen.end());
}

}  // namespace adastep
