#include "adastep/linesearch.hpp"

#include <cmath>
#include <string>

namespace adastep {

void LineSearchParams::validate() const {
  if (!(beta >= 0.5 && beta < 1.0)) throw ConfigError("line search: beta must lie in [0.5, 1)");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("line search: rho must lie in (0, 1)");
  if (!(gamma_max > 0.0) || !std::isfinite(gamma_max))
    throw ConfigError("line search: gamma_max must be positive");
  if (max_probes == 0) throw ConfigError("line search: max_probes must be positive");
}

bool armijo_holds(const std::function<double(const Vec &)> &value, double f_at_x, double grad_sq,
                  const Vec &x, const Vec &direction, double gamma, double rho) {
  const Vec trial = x - gamma * direction;
  return value(trial) <= f_at_x - rho * gamma * grad_sq;
}

LineSearchResult backtracking_armijo(const std::function<double(const Vec &)> &value,
                                     double f_at_x, double grad_sq, const Vec &x,
                                     const Vec &direction, const LineSearchParams &params) {
  params.validate();
  if (!(grad_sq > 0.0)) throw std::invalid_argument("backtracking_armijo: grad_sq must be positive");
  LineSearchResult res{params.gamma_max, 0};
  Vec trial(x.size());
  while (true) {
    if (res.probes == params.max_probes)
      throw NumericError("backtracking_armijo: no acceptable step after " +
                         std::to_string(params.max_probes) + " probes");
    ++res.probes;
    trial = x - res.gamma * direction;
    const double v = value(trial);
    // NaN fails the comparison and keeps shrinking.
    if (v <= f_at_x - params.rho * res.gamma * grad_sq) return res;
    res.gamma *= params.beta;
  }
}

}  // namespace adastep
