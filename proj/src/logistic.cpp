#include "adastep/logistic.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace adastep {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LogisticRegressionProblem::LogisticRegressionProblem(SparseDataset data) : data_(std::move(data)) {
  if (data_.rows() == 0) throw ConfigError("logistic: empty dataset");
  if (data_.dim == 0) throw ConfigError("logistic: dataset has no features");
  reg_ = 1.0 / (2.0 * static_cast<double>(data_.rows()));
  double max_row = 0.0;
  for (Index i = 0; i < data_.rows(); ++i) max_row = std::max(max_row, data_.row_norm_sq(i));
  smoothness_ = 0.25 * max_row + 2.0 * reg_;
  hash_ = dataset_hash(data_);
}

double LogisticRegressionProblem::component_value(Index i, const Vec &x) const {
  const double margin = data_.labels[i] * data_.dot(i, x);
  return softplus(-margin) + reg_ * x.squaredNorm();
}

void LogisticRegressionProblem::add_component_gradient(Index i, const Vec &x, double scale,
                                                       Vec &out) const {
  const double y = data_.labels[i];
  const double margin = y * data_.dot(i, x);
  data_.axpy(i, -scale * y * sigmoid(-margin), out);
  out.noalias() += (scale * 2.0 * reg_) * x;
}

namespace {

struct Objective {
  const SparseDataset &data;
  std::span<const Index> rows;
  double reg;

  double value(const Vec &x) const {
    double s = 0.0;
    for (Index i : rows) s += softplus(-data.labels[i] * data.dot(i, x));
    return s / static_cast<double>(rows.size()) + reg * x.squaredNorm();
  }

  Vec gradient(const Vec &x) const {
    Vec g = 2.0 * reg * x;
    const double inv = 1.0 / static_cast<double>(rows.size());
    for (Index i : rows) {
      const double y = data.labels[i];
      data.axpy(i, -inv * y * sigmoid(-y * data.dot(i, x)), g);
    }
    return g;
  }

  // Solves H p = r with H = 2 reg I + (1/m) sum s_i a_i a_i^T.
  Vec solve_hessian(const Vec &x, const Vec &r) const {
    const auto d = static_cast<Eigen::Index>(data.dim);
    const auto m = static_cast<Eigen::Index>(rows.size());
    const double inv = 1.0 / static_cast<double>(rows.size());
    const double c = 2.0 * reg;
    std::vector<double> weight(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const Index i = rows[k];
      const double p = sigmoid(data.labels[i] * data.dot(i, x));
      weight[k] = std::sqrt(inv * p * (1.0 - p));
    }
    // U = [w_k a_k] (d x m); H = c I + U U^T.
    Mat u = Mat::Zero(d, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const Index i = rows[static_cast<std::size_t>(k)];
      for (std::size_t p = data.row_begin(i); p < data.row_end(i); ++p)
        u(data.columns[p], k) = weight[static_cast<std::size_t>(k)] * data.values[p];
    }
    if (d <= m) {
      Mat h = u * u.transpose();
      h.diagonal().array() += c;
      return h.ldlt().solve(r);
    }
    // Woodbury: (cI + UU^T)^-1 r = (r - U (cI + U^T U)^-1 U^T r) / c
    Mat small = u.transpose() * u;
    small.diagonal().array() += c;
    const Vec inner = small.ldlt().solve(u.transpose() * r);
    return (r - u * inner) / c;
  }
};

}  // namespace

NewtonResult logistic_newton(const SparseDataset &data, std::span<const Index> rows, double reg,
                             double grad_tol) {
  Objective obj{data, rows, reg};
  NewtonResult res;
  res.x = Vec::Zero(static_cast<Eigen::Index>(data.dim));
  res.value = obj.value(res.x);
  Vec g = obj.gradient(res.x);
  for (res.iterations = 0; res.iterations < 200; ++res.iterations) {
    res.grad_norm = g.norm();
    if (res.grad_norm <= grad_tol) return res;
    const Vec step = obj.solve_hessian(res.x, g);
    const double slope = -g.dot(step);
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      const Vec trial = res.x - t * step;
      const double v = obj.value(trial);
      if (v <= res.value + 1e-4 * t * slope) {
        res.x = trial;
        res.value = v;
        moved = true;
        break;
      }
    }
    if (!moved) {
      // Value has hit rounding level; accept a full step and let the gradient decide.
      res.x -= step;
      res.value = obj.value(res.x);
    }
    g = obj.gradient(res.x);
  }
  res.grad_norm = g.norm();
  if (res.grad_norm > grad_tol)
    throw NumericError("logistic_newton: gradient norm " + std::to_string(res.grad_norm) +
                       " above tolerance after 200 iterations");
  return res;
}

std::optional<double> LogisticRegressionProblem::batch_min(std::span<const Index> batch) const {
  return logistic_newton(data_, batch, reg_, 1e-10).value;
}

ReferenceOptimum LogisticRegressionProblem::reference_optimum() const {
  static std::mutex mutex;
  static std::map<std::string, ReferenceOptimum> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(hash_); it != cache.end()) return it->second;
  }
  std::vector<Index> all(size());
  std::iota(all.begin(), all.end(), Index{0});
  const NewtonResult res = logistic_newton(data_, all, reg_, 1e-10);
  ReferenceOptimum ref;
  ref.x_star = res.x;
  ref.f_star = objective(res.x);
  ref.method = "damped Newton to |grad f| <= 1e-10 (dataset " + hash_ + ")";
  std::lock_guard lock(mutex);
  return cache.emplace(hash_, std::move(ref)).first->second;
}

}  // namespace adastep
