#include "adastep/quadratic.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace adastep {

std::string to_string(QuadraticRegime regime) {
  return regime == QuadraticRegime::strongly_convex ? "strongly_convex" : "general_convex";
}

QuadraticRegime quadratic_regime_from_string(const std::string &s) {
  if (s == "strongly_convex") return QuadraticRegime::strongly_convex;
  if (s == "general_convex") return QuadraticRegime::general_convex;
  throw ConfigError("unknown quadratic regime '" + s + "'");
}

DiagonalQuadraticProblem::DiagonalQuadraticProblem(Mat curvature, Mat centers, Meta meta)
    : a_(std::move(curvature)), b_(std::move(centers)), meta_(meta) {
  if (a_.rows() == 0 || a_.cols() == 0) throw ConfigError("quadratic: empty instance");
  if (a_.rows() != b_.rows() || a_.cols() != b_.cols())
    throw ConfigError("quadratic: curvature and center shapes differ");
  if (!a_.allFinite() || !b_.allFinite()) throw ConfigError("quadratic: non-finite entries");
  if ((a_.array() < 0.0).any()) throw ConfigError("quadratic: negative curvature entry");
}

double DiagonalQuadraticProblem::component_value(Index i, const Vec &x) const {
  const auto row = static_cast<Eigen::Index>(i);
  return 0.5 * (a_.row(row).transpose().array() * (x - b_.row(row).transpose()).array().square()).sum();
}

void DiagonalQuadraticProblem::add_component_gradient(Index i, const Vec &x, double scale,
                                                      Vec &out) const {
  const auto row = static_cast<Eigen::Index>(i);
  out.array() += scale * a_.row(row).transpose().array() * (x - b_.row(row).transpose()).array();
}

namespace {

// Minimizer and minimum of 1/2 sum_i w_i (x - c_i)^2 over one coordinate.
// Returns {x, value}; when all weighted centers coincide the minimizer is that
// center exactly, which keeps interpolated instances at exactly zero.
std::pair<double, double> coordinate_min(const Mat &a, const Mat &b, Eigen::Index k,
                                         std::span<const Index> rows) {
  double wsum = 0.0, wc = 0.0;
  bool same = true;
  double first = 0.0;
  bool have_first = false;
  for (Index i : rows) {
    const auto r = static_cast<Eigen::Index>(i);
    const double w = a(r, k);
    if (w == 0.0) continue;
    wsum += w;
    wc += w * b(r, k);
    if (!have_first) {
      first = b(r, k);
      have_first = true;
    } else if (b(r, k) != first) {
      same = false;
    }
  }
  if (wsum == 0.0) return {0.0, 0.0};
  const double x = same ? first : wc / wsum;
  double value = 0.0;
  for (Index i : rows) {
    const auto r = static_cast<Eigen::Index>(i);
    const double diff = x - b(r, k);
    value += 0.5 * a(r, k) * diff * diff;
  }
  return {x, value};
}

}  // namespace

std::optional<double> DiagonalQuadraticProblem::batch_min(std::span<const Index> batch) const {
  double total = 0.0;
  for (Eigen::Index k = 0; k < a_.cols(); ++k) total += coordinate_min(a_, b_, k, batch).second;
  return total / static_cast<double>(batch.size());
}

double DiagonalQuadraticProblem::batch_lower_bound(std::span<const Index> batch) const {
  return lb_mode_ == LowerBoundMode::exact ? *batch_min(batch) : 0.0;
}

std::optional<double> DiagonalQuadraticProblem::smoothness() const { return a_.maxCoeff(); }

std::optional<double> DiagonalQuadraticProblem::strong_convexity() const {
  const double mu = a_.minCoeff();
  if (mu > 0.0) return mu;
  return std::nullopt;
}

Vec DiagonalQuadraticProblem::mean_curvature() const { return a_.colwise().mean().transpose(); }

ReferenceOptimum DiagonalQuadraticProblem::reference_optimum() const {
  std::vector<Index> all(size());
  for (Index i = 0; i < size(); ++i) all[i] = i;
  ReferenceOptimum ref;
  ref.x_star.resize(a_.cols());
  for (Eigen::Index k = 0; k < a_.cols(); ++k) {
    if (a_.col(k).sum() == 0.0)
      throw NumericError("quadratic: zero averaged curvature at coordinate " + std::to_string(k));
    ref.x_star[k] = coordinate_min(a_, b_, k, all).first;
  }
  ref.f_star = objective(ref.x_star);
  ref.method = "closed-form coordinatewise weighted mean";
  return ref;
}

double DiagonalQuadraticProblem::proxy_min(std::span<const Index> batch, const Vec &g,
                                           const Vec &anchor, double mu) const {
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (Eigen::Index k = 0; k < a_.cols(); ++k) {
    double a = 0.0, c = 0.0;
    for (Index i : batch) {
      const auto r = static_cast<Eigen::Index>(i);
      a += a_(r, k);
      c += a_(r, k) * b_(r, k);
    }
    a *= inv_b;
    c *= inv_b;
    const double curv = a + mu;
    double x;
    if (curv == 0.0) {
      if (g[k] != 0.0) throw NumericError("proxy_min: unbounded below (zero curvature, g != 0)");
      x = anchor[k];
    } else {
      x = (c - g[k] + mu * anchor[k]) / curv;
    }
    double fk = 0.0;
    for (Index i : batch) {
      const auto r = static_cast<Eigen::Index>(i);
      const double diff = x - b_(r, k);
      fk += 0.5 * a_(r, k) * diff * diff;
    }
    const double dz = x - anchor[k];
    total += fk * inv_b + x * g[k] + 0.5 * mu * dz * dz;
  }
  return total;
}

std::string fnv1a_hex(const void *data, std::size_t size, std::uint64_t basis) {
  std::uint64_t h = basis;
  const auto *p = static_cast<const unsigned char *>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string DiagonalQuadraticProblem::content_hash() const {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(2 * a_.size() + 2));
  flat.push_back(static_cast<double>(a_.rows()));
  flat.push_back(static_cast<double>(a_.cols()));
  for (Eigen::Index i = 0; i < a_.rows(); ++i)
    for (Eigen::Index k = 0; k < a_.cols(); ++k) flat.push_back(a_(i, k));
  for (Eigen::Index i = 0; i < b_.rows(); ++i)
    for (Eigen::Index k = 0; k < b_.cols(); ++k) flat.push_back(b_(i, k));
  return fnv1a_hex(flat.data(), flat.size() * sizeof(double));
}

DiagonalQuadraticProblem generate_quadratic(QuadraticRegime regime, bool interpolated, Index n,
                                            Index d, std::uint64_t seed, double mask_p) {
  constexpr Index kTinyColumns = 20;
  if (n < 1) throw ConfigError("generate_quadratic: n must be >= 1");
  if (regime == QuadraticRegime::strongly_convex && d < 2)
    throw ConfigError("generate_quadratic: strongly convex regime needs d >= 2");
  if (regime == QuadraticRegime::general_convex && d < kTinyColumns + 1)
    throw ConfigError("generate_quadratic: general convex regime needs d >= 21");
  if (regime == QuadraticRegime::general_convex && !(mask_p > 0.0 && mask_p <= 1.0))
    throw ConfigError("generate_quadratic: mask probability must be in (0, 1]");

  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(d);
  Rng rng(seed);

  // Draw order is part of the instance definition: A row-major, mask
  // column-major, then centers.
  Mat a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) a(i, k) = std::clamp(rng.normal(0.0, 15.0), 1.0, 10.0);

  std::vector<double> target(static_cast<std::size_t>(cols), 0.0);  // 0 = leave column as is
  if (regime == QuadraticRegime::strongly_convex) {
    target[static_cast<std::size_t>(cols - 2)] = 1.0;
    target[static_cast<std::size_t>(cols - 1)] = 10.0;
  } else {
    for (Eigen::Index k = 0; k < cols; ++k) {
      bool nonempty = false;
      std::vector<char> mask(static_cast<std::size_t>(rows));
      while (!nonempty) {
        for (Eigen::Index i = 0; i < rows; ++i) {
          mask[static_cast<std::size_t>(i)] = rng.bernoulli(mask_p) ? 1 : 0;
          nonempty = nonempty || mask[static_cast<std::size_t>(i)];
        }
      }
      for (Eigen::Index i = 0; i < rows; ++i)
        if (!mask[static_cast<std::size_t>(i)]) a(i, k) = 0.0;
    }
    for (Index k = 0; k < kTinyColumns; ++k) target[k] = std::ldexp(1.0, static_cast<int>(k) - 20);
    target[static_cast<std::size_t>(cols - 1)] = 10.0;
  }
  for (Eigen::Index k = 0; k < cols; ++k) {
    const double t = target[static_cast<std::size_t>(k)];
    if (t == 0.0) continue;
    a.col(k) *= t * static_cast<double>(n) / a.col(k).sum();
  }

  Mat b(rows, cols);
  if (interpolated) {
    Vec shared(cols);
    for (Eigen::Index k = 0; k < cols; ++k) shared[k] = rng.normal(0.0, 10.0);
    for (Eigen::Index i = 0; i < rows; ++i) b.row(i) = shared.transpose();
  } else {
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index k = 0; k < cols; ++k) b(i, k) = rng.normal(0.0, 10.0);
  }

  DiagonalQuadraticProblem::Meta meta{regime, interpolated, seed,
                                      regime == QuadraticRegime::general_convex ? mask_p : 0.0};
  return DiagonalQuadraticProblem(std::move(a), std::move(b), meta);
}

namespace {
constexpr const char *kQuadraticSchema = "adastep-quadratic/1";

nlohmann::json matrix_rows(const Mat &m) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(std::move(row));
  }
  return out;
}

Mat rows_matrix(const nlohmann::json &j, Index n, Index d, const char *what) {
  if (!j.is_array() || j.size() != n) throw ConfigError(std::string("quadratic file: bad ") + what);
  Mat m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Index i = 0; i < n; ++i) {
    const auto &row = j[i];
    if (!row.is_array() || row.size() != d)
      throw ConfigError(std::string("quadratic file: bad row in ") + what);
    for (Index k = 0; k < d; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k].get<double>();
  }
  return m;
}
}  // namespace

std::string serialize_quadratic(const DiagonalQuadraticProblem &problem) {
  nlohmann::json j;
  j["schema"] = kQuadraticSchema;
  j["regime"] = to_string(problem.meta().regime);
  j["interpolated"] = problem.meta().interpolated;
  j["seed"] = problem.meta().seed;
  j["mask_p"] = problem.meta().mask_p;
  j["n"] = problem.size();
  j["d"] = problem.dim();
  j["A"] = matrix_rows(problem.curvature());
  j["b"] = matrix_rows(problem.centers());
  return j.dump() + "\n";
}

DiagonalQuadraticProblem parse_quadratic(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("quadratic file: ") + e.what());
  }
  static const std::set<std::string> keys{"schema", "regime", "interpolated", "seed", "mask_p",
                                          "n",      "d",      "A",            "b"};
  for (const auto &item : j.items())
    if (!keys.count(item.key())) throw ConfigError("quadratic file: unknown key '" + item.key() + "'");
  try {
    if (j.at("schema").get<std::string>() != kQuadraticSchema)
      throw ConfigError("quadratic file: unsupported schema");
    const auto n = j.at("n").get<Index>();
    const auto d = j.at("d").get<Index>();
    DiagonalQuadraticProblem::Meta meta;
    meta.regime = quadratic_regime_from_string(j.at("regime").get<std::string>());
    meta.interpolated = j.at("interpolated").get<bool>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.mask_p = j.at("mask_p").get<double>();
    return DiagonalQuadraticProblem(rows_matrix(j.at("A"), n, d, "A"),
                                    rows_matrix(j.at("b"), n, d, "b"), meta);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("quadratic file: ") + e.what());
  }
}

}  // namespace adastep
