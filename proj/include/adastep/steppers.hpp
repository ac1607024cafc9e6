#pragma once

#include "adastep/linesearch.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>

namespace adastep {

/// Added to the square-rooted accumulator in AdaSPS/AdaSLS denominators.
inline constexpr double kEpsilonGuard = 1e-10;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Named numeric state, written into trace headers.
using StateMap = std::map<std::string, double>;

/// A multiplicative constant that is either fixed up front or resolved from
/// the first iteration's readings and then frozen.
class ScaleCalibration {
 public:
  static ScaleCalibration fixed(double value);
  static ScaleCalibration from_scale(double scale);

  bool resolved() const { return resolved_; }
  double value() const { return value_; }
  double scale() const { return scale_; }
  /// True when the first readings had a zero denominator and value = scale.
  bool fell_back() const { return fell_back_; }

  /// c = scale / sqrt(f - lb). No-op once resolved.
  double resolve_polyak(double gap);
  /// c = scale / (rho * sqrt(gamma * grad_sq)). No-op once resolved.
  double resolve_linesearch(double rho, double gamma, double grad_sq);

 private:
  double finish(double denominator);

  double scale_ = 1.0;
  double value_ = 0.0;
  bool resolved_ = false;
  bool fell_back_ = false;
};

/// Adaptive stochastic Polyak stepsize:
///   eta_t = min{ (f - lb) / (c_p ||g||^2 (sqrt(sum_s (f_s - lb_s)) + eps)), eta_{t-1} }
/// with eta_{-1} = +inf.
class AdaSps {
 public:
  explicit AdaSps(ScaleCalibration c_p) : c_p_(c_p) {}

  /// Throws LowerBoundError when f_batch < lb. A zero gradient returns the
  /// previous stepsize; the caller must skip the parameter update.
  double step(double f_batch, double lb, double grad_sq);

  double accumulator() const { return accumulator_; }
  double eta_prev() const { return eta_prev_; }
  const ScaleCalibration &c_p() const { return c_p_; }
  StateMap state() const;

 private:
  ScaleCalibration c_p_;
  double accumulator_ = 0.0;
  double eta_prev_ = kInfinity;
};

/// Adaptive stochastic line-search stepsize:
///   eta_t = min{ gamma_t / (c_l (sqrt(sum_s gamma_s ||g_s||^2) + eps)), eta_{t-1} }.
class AdaSls {
 public:
  AdaSls(ScaleCalibration c_l, double rho) : c_l_(c_l), rho_(rho) {}

  double step(double gamma, double grad_sq);

  double accumulator() const { return accumulator_; }
  double eta_prev() const { return eta_prev_; }
  const ScaleCalibration &c_l() const { return c_l_; }
  StateMap state() const;

 private:
  ScaleCalibration c_l_;
  double rho_;
  double accumulator_ = 0.0;
  double eta_prev_ = kInfinity;
};

/// Decreasing SPS: eta_t = min{ (f - lb) / (c_t ||g||^2), (c_{t-1}/c_t) eta_{t-1} }
/// with c_t = c_0 sqrt(t + 1) and c_{-1} eta_{-1} = c_0 gamma_b.
class DecSps {
 public:
  DecSps(double c0, double gamma_b);

  double step(double f_batch, double lb, double grad_sq);

  std::uint64_t t() const { return t_; }
  double eta_prev() const { return eta_prev_; }
  StateMap state() const;

 private:
  double c0_;
  double gamma_b_;
  std::uint64_t t_ = 0;
  double eta_prev_ = kInfinity;
};

/// SPS: eta = (f - f*) / (c ||g||^2); SPS_max additionally caps at gamma_b.
class Sps {
 public:
  explicit Sps(double c = 0.5, std::optional<double> gamma_b = std::nullopt);

  double step(double f_batch, double f_star_batch, double grad_sq);
  StateMap state() const;

 private:
  double c_;
  std::optional<double> gamma_b_;
};

/// Plain stochastic line search: the stepsize is the Armijo scale itself.
struct Sls {
  double step(const LineSearchResult &result) const { return result.gamma; }
};

/// AdaGrad-Norm: eta_t = c_g / sqrt(sum_s ||g_s||^2 + b0^2).
class AdaGradNorm {
 public:
  AdaGradNorm(double c_g, double b0);

  double step(double grad_sq);

  double accumulator() const { return accumulator_; }
  StateMap state() const;

 private:
  double c_g_;
  double b0_sq_;
  double accumulator_ = 0.0;
};

enum class Schedule { constant, inv_sqrt, inv_t };

std::string to_string(Schedule s);
Schedule schedule_from_string(const std::string &s);

/// eta0, eta0 / sqrt(t + 1) or eta0 / (t + 1).
double sgd_schedule_step(Schedule kind, double eta0, std::uint64_t t);

/// AdaSPS with epoch restarts: every `update_every` iterations c_p is
/// recomputed from the accumulated gap and the unclamped candidate is emitted.
class AdaSpsDl {
 public:
  AdaSpsDl(double c_p_scale, std::uint64_t update_every);

  double step(double f_batch, double lb, double grad_sq);

  double accumulator() const { return accumulator_; }
  double eta_prev() const { return eta_prev_; }
  double c_p() const { return c_p_; }
  std::uint64_t t() const { return t_; }
  StateMap state() const;

 private:
  double scale_;
  std::uint64_t update_every_;
  double c_p_ = 0.0;
  double accumulator_ = 0.0;
  double eta_prev_ = kInfinity;
  std::uint64_t t_ = 0;
};

}  // namespace adastep
