#pragma once

#include "adastep/problem.hpp"

#include <cstdint>
#include <string>

namespace adastep {

enum class QuadraticRegime { strongly_convex, general_convex };

std::string to_string(QuadraticRegime regime);
QuadraticRegime quadratic_regime_from_string(const std::string &s);

/// How batch_lower_bound answers: the generic zero bound, or the exact batch minimum.
enum class LowerBoundMode { zero, exact };

/// Provenance of a generated instance.
struct QuadraticMeta {
  QuadraticRegime regime = QuadraticRegime::strongly_convex;
  bool interpolated = false;
  std::uint64_t seed = 0;
  double mask_p = 0.0;
};

/// f_i(x) = 1/2 (x - b_i)^T diag(A_i) (x - b_i); row i of A holds diag(A_i).
class DiagonalQuadraticProblem final : public FiniteSumProblem {
 public:
  using Meta = QuadraticMeta;

  /// Rows are components. Throws ConfigError on shape mismatch or negative curvature.
  DiagonalQuadraticProblem(Mat curvature, Mat centers, Meta meta = {});

  Index size() const override { return static_cast<Index>(a_.rows()); }
  Index dim() const override { return static_cast<Index>(a_.cols()); }

  double component_value(Index i, const Vec &x) const override;
  void add_component_gradient(Index i, const Vec &x, double scale, Vec &out) const override;

  double batch_lower_bound(std::span<const Index> batch) const override;
  std::optional<double> batch_min(std::span<const Index> batch) const override;
  std::optional<double> smoothness() const override;
  std::optional<double> strong_convexity() const override;
  ReferenceOptimum reference_optimum() const override;
  std::string content_hash() const override;
  std::string kind() const override { return "diagonal_quadratic"; }

  /// Exact minimum of F(x) = f_batch(x) + x^T g + (mu/2)||x - anchor||^2.
  /// Throws NumericError when F is unbounded below.
  double proxy_min(std::span<const Index> batch, const Vec &g, const Vec &anchor, double mu) const;

  void set_lower_bound_mode(LowerBoundMode mode) { lb_mode_ = mode; }
  LowerBoundMode lower_bound_mode() const { return lb_mode_; }

  const Mat &curvature() const { return a_; }
  const Mat &centers() const { return b_; }
  const Meta &meta() const { return meta_; }

  /// Diagonal of the Hessian of f, i.e. the column means of A.
  Vec mean_curvature() const;

 private:
  Mat a_;
  Mat b_;
  Meta meta_;
  LowerBoundMode lb_mode_ = LowerBoundMode::zero;
};

/// Synthetic instance generator.
///
/// Entries N(0, 15^2) are clipped to [1, 10]. Strongly convex: the last two
/// columns are rescaled so the Hessian diagonal has minimum 1 and maximum 10.
/// General convex: a Bernoulli(mask_p) mask with no empty column is applied,
/// then the first 20 column means are set to 2^-20 .. 2^-1 and the last to 10.
/// Centers are N(0, 10^2), shared by all components when interpolated.
DiagonalQuadraticProblem generate_quadratic(QuadraticRegime regime, bool interpolated, Index n,
                                            Index d, std::uint64_t seed, double mask_p = 0.1);

/// Structured text form: shareable and replayable bit-exactly.
std::string serialize_quadratic(const DiagonalQuadraticProblem &problem);
DiagonalQuadraticProblem parse_quadratic(const std::string &text);

/// FNV-1a 64-bit digest, hex encoded.
std::string fnv1a_hex(const void *data, std::size_t size, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace adastep
