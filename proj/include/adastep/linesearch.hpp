#pragma once

#include "adastep/types.hpp"

#include <cstdint>
#include <functional>

namespace adastep {

struct LineSearchParams {
  double beta = 0.8;        // backtracking factor, in [1/2, 1)
  double rho = 0.5;         // sufficient-decrease constant, in (0, 1)
  double gamma_max = 10.0;  // initial trial scale
  std::uint32_t max_probes = 200;

  /// Throws ConfigError when a parameter is outside its admissible range.
  void validate() const;

  /// Defaults for AdaSLS / AdaSVRLS.
  static LineSearchParams adaptive(double gamma_max = 10.0) { return {0.8, 0.5, gamma_max, 200}; }
  /// Defaults for the plain SLS baseline.
  static LineSearchParams baseline(double gamma_max = 10.0) { return {0.9, 0.1, gamma_max, 200}; }
};

struct LineSearchResult {
  double gamma = 0.0;
  std::uint32_t probes = 0;
};

/// Backtracking line search for the Armijo condition
///   f(x - gamma d) <= f(x) - rho * gamma * grad_sq,
/// starting at gamma_max and shrinking by beta. Returns the first accepted
/// gamma = gamma_max * beta^k and probes = k + 1.
///
/// `value` evaluates the same minibatch function for every probe; the caller
/// passes f(x) and grad_sq = ||grad f(x)||^2 so no extra work is done here.
/// Throws NumericError when max_probes is exceeded.
LineSearchResult backtracking_armijo(const std::function<double(const Vec &)> &value,
                                     double f_at_x, double grad_sq, const Vec &x,
                                     const Vec &direction, const LineSearchParams &params);

/// Independent re-check of the Armijo inequality at a given scale.
bool armijo_holds(const std::function<double(const Vec &)> &value, double f_at_x, double grad_sq,
                  const Vec &x, const Vec &direction, double gamma, double rho);

}  // namespace adastep
