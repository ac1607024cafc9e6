#pragma once

#include "adastep/quadratic.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace adastep {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// f_i(x) = a_i (x - c_i)^2 on the real line.
struct ScalarQuadratic {
  double a;
  double c;
};

/// E_i[(f_i(x) - f_i*) / |f_i'(x)|^2] over uniformly drawn i.
double expected_polyak_step(const std::vector<ScalarQuadratic> &parts, double x);

/// E_i[eta_i f'(x)] with eta_i = (f_i(x) - f_i*) / |f_i'(x) - f_i'(w) + f'(w)|^2 and w = x.
double expected_corrected_polyak_direction(const std::vector<ScalarQuadratic> &parts, double x);

/// Both sides of sqrt(sum a) <= sum_t a_t / sqrt(sum_{s<=t} a_s) <= 2 sqrt(sum a).
struct RootSums {
  double root_total = 0.0;
  double weighted = 0.0;
};
RootSums root_sums(const std::vector<double> &a);

/// x^2 <= a (x + b) with a, b >= 0 implies x <= a + sqrt(a b). Returns false
/// only when the premise holds and the conclusion fails.
bool quadratic_implication_holds(double x, double a, double b, double slack = 1e-12);

/// Sides of E_i[F_i(x) - F_i*] <= f(x) - f* + E_i||grad f_i(w) - grad f_i(x*)||^2 / (2 mu)
/// for single-component proxies anchored at x, enumerated exactly.
struct ProxyGapSides {
  double lhs = 0.0;
  double rhs = 0.0;
};
ProxyGapSides proxy_gap_sides(const DiagonalQuadraticProblem &problem, const Vec &x, const Vec &w, double mu);

/// The property suite behind `adastep verify`.
std::vector<CheckResult> run_verification_suite(std::uint64_t seed = 0);

}  // namespace adastep
