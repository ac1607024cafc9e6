#include "adastep/verification.hpp"

#include "adastep/optimal_gap.hpp"
#include "adastep/projection.hpp"
#include "adastep/varred.hpp"

#include <cmath>
#include <sstream>

namespace adastep {

double expected_polyak_step(const std::vector<ScalarQuadratic> &parts, double x) {
  double sum = 0.0;
  for (const auto &p : parts) {
    const double value = p.a * (x - p.c) * (x - p.c);
    const double slope = 2.0 * p.a * (x - p.c);
    sum += value / (slope * slope);
  }
  return sum / static_cast<double>(parts.size());
}

double expected_corrected_polyak_direction(const std::vector<ScalarQuadratic> &parts, double x) {
  double full_slope = 0.0;
  for (const auto &p : parts) full_slope += 2.0 * p.a * (x - p.c);
  full_slope /= static_cast<double>(parts.size());
  double sum = 0.0;
  for (const auto &p : parts) {
    const double value = p.a * (x - p.c) * (x - p.c);
    // With w = x the corrected slope collapses to the full slope.
    sum += value / (full_slope * full_slope) * full_slope;
  }
  return sum / static_cast<double>(parts.size());
}

RootSums root_sums(const std::vector<double> &a) {
  RootSums s;
  double partial = 0.0;
  for (double v : a) {
    partial += v;
    if (partial > 0.0) s.weighted += v / std::sqrt(partial);
  }
  s.root_total = std::sqrt(partial);
  return s;
}

bool quadratic_implication_holds(double x, double a, double b, double slack) {
  if (!(x * x <= a * (x + b))) return true;
  return x <= (a + std::sqrt(a * b)) * (1.0 + slack) + slack;
}

ProxyGapSides proxy_gap_sides(const DiagonalQuadraticProblem &problem, const Vec &x, const Vec &w, double mu) {
  const Index n = problem.size();
  const ReferenceOptimum ref = problem.reference_optimum();
  const Vec full_w = problem.objective_gradient(w);
  ProxyGapSides s;
  double drift = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Index batch[1] = {i};
    const Vec gi_w = problem.batch_gradient(batch, w);
    const Vec correction = full_w - gi_w;
    const double value = problem.component_value(i, x) + x.dot(correction);
    s.lhs += value - problem.proxy_min(batch, correction, x, mu);
    drift += (gi_w - problem.batch_gradient(batch, ref.x_star)).squaredNorm();
  }
  s.lhs /= static_cast<double>(n);
  s.rhs = problem.objective(x) - ref.f_star + drift / (2.0 * mu * static_cast<double>(n));
  return s;
}

namespace {

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

Vec random_vec(Rng &rng, Index d, double scale) {
  Vec v(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = scale * rng.normal();
  return v;
}

DiagonalQuadraticProblem small_quadratic(Rng &rng, Index n, Index d) {
  Mat a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Mat b(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      a(i, j) = 0.1 + 5.0 * rng.uniform01();
      b(i, j) = 3.0 * rng.normal();
    }
  return DiagonalQuadraticProblem(std::move(a), std::move(b));
}

void example_identities(std::vector<CheckResult> &out) {
  for (double a2 : {1.0, 0.1, 0.01}) {
    const double got = expected_polyak_step({{1.0, 1.0}, {a2, -1.0}}, 0.0);
    const double want = 1.0 / 8.0 + 1.0 / (8.0 * a2);
    out.push_back({"polyak step expectation a2=" + fmt(a2), std::abs(got - want) <= 1e-12,
                   "got " + fmt(got) + " want " + fmt(want)});
  }
  for (double x : {1.0, 2.0, -3.0}) {
    const double got = expected_corrected_polyak_direction({{1.0, 1.0}, {1.0, -1.0}}, x);
    const double want = (x * x + 1.0) / (2.0 * x);
    out.push_back({"corrected polyak direction x=" + fmt(x), std::abs(got - want) <= 1e-12,
                   "got " + fmt(got) + " want " + fmt(want)});
  }
}

void root_sum_bounds(Rng &rng, std::vector<CheckResult> &out) {
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> a(1 + rng.uniform_index(50));
    for (double &v : a) v = rng.bernoulli(0.2) ? 0.0 : std::exp(4.0 * rng.normal());
    a[0] = std::max(a[0], 1e-3);
    const RootSums s = root_sums(a);
    const double tol = 1e-12 * s.root_total;
    if (s.weighted < s.root_total - tol || s.weighted > 2.0 * s.root_total + tol) ++failures;
  }
  out.push_back({"root-sum double inequality (1000 sequences)", failures == 0,
                 std::to_string(failures) + " violations"});
}

void quadratic_implication(Rng &rng, std::vector<CheckResult> &out) {
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = std::exp(2.0 * rng.normal());
    const double b = std::exp(2.0 * rng.normal());
    const double root = 0.5 * (a + std::sqrt(a * a + 4.0 * a * b));
    const double x = root * rng.uniform01();
    if (!quadratic_implication_holds(x, a, b)) ++failures;
  }
  out.push_back({"x^2 <= a(x+b) implication (1000 triples)", failures == 0,
                 std::to_string(failures) + " violations"});
}

void projection_properties(Rng &rng, std::vector<CheckResult> &out) {
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index d = 1 + rng.uniform_index(8);
    const ProjectionDomain ball = ProjectionDomain::ball(random_vec(rng, d, 1.0), 0.1 + 3.0 * rng.uniform01());
    const Vec x = random_vec(rng, d, 4.0);
    const Vec y = random_vec(rng, d, 4.0);
    const Vec px = project(ball, x);
    const Vec py = project(ball, y);
    const bool idempotent = (project(ball, px) - px).norm() <= 1e-12 * (1.0 + px.norm());
    const bool contracting = (px - py).norm() <= (x - y).norm() * (1.0 + 1e-12) + 1e-15;
    if (!idempotent || !contracting) ++failures;
  }
  out.push_back({"projection idempotent and non-expansive (1000 pairs)", failures == 0,
                 std::to_string(failures) + " violations"});
}

void proxy_unbiased(Rng &rng, std::vector<CheckResult> &out) {
  double worst = 0.0;
  for (Index n = 2; n <= 6; ++n) {
    const DiagonalQuadraticProblem problem = small_quadratic(rng, n, 3);
    const Vec x = random_vec(rng, 3, 2.0);
    const Vec w = random_vec(rng, 3, 2.0);
    Oracle oracle(problem);
    const Snapshot snap = Snapshot::take(oracle, w);
    for (Index B = 1; B <= n; ++B) {
      Vec mean = Vec::Zero(3);
      double count = 0.0;
      for_each_batch(n, B, 0, 0, [&](const Batch &batch) {
        ProxyFunction proxy = ProxyFunction::from_snapshot(oracle, batch, snap, x, 10.0);
        mean += proxy.gradient(x);
        count += 1.0;
      });
      mean /= count;
      const Vec full = problem.objective_gradient(x);
      worst = std::max(worst, (mean - full).norm() / (1.0 + full.norm()));
    }
  }
  out.push_back({"proxy gradient unbiased by enumeration (n <= 6)", worst <= 1e-12,
                 "max relative deviation " + fmt(worst)});
}

void sigma_monotone(Rng &rng, std::vector<CheckResult> &out) {
  bool ok = true;
  std::string detail;
  for (int trial = 0; trial < 5; ++trial) {
    const DiagonalQuadraticProblem problem = small_quadratic(rng, 6, 3);
    const double f_star = problem.reference_optimum().f_star;
    double prev = kInfinity;
    for (Index B = 1; B <= 6; ++B) {
      const double s = sigma_f_B(problem, f_star, B);
      if (s > prev + 1e-12 * (1.0 + std::abs(prev))) {
        ok = false;
        detail = "increase at B=" + std::to_string(B);
      }
      prev = s;
    }
  }
  out.push_back({"optimal objective difference non-increasing in B", ok, ok ? "5 instances" : detail});
}

void proxy_gap_bound(Rng &rng, std::vector<CheckResult> &out) {
  int failures = 0;
  double worst = -kInfinity;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 2 + rng.uniform_index(5);
    const Index d = 1 + rng.uniform_index(4);
    const DiagonalQuadraticProblem problem = small_quadratic(rng, n, d);
    const double mu = std::exp(2.0 * rng.normal());
    const ProxyGapSides s = proxy_gap_sides(problem, random_vec(rng, d, 3.0), random_vec(rng, d, 3.0), mu);
    worst = std::max(worst, s.lhs - s.rhs);
    if (s.lhs > s.rhs + 1e-10 * (1.0 + std::abs(s.rhs))) ++failures;
  }
  out.push_back({"proxy gap bound (100 instances)", failures == 0,
                 std::to_string(failures) + " violations, max lhs-rhs " + fmt(worst)});
}

}  // namespace

std::vector<CheckResult> run_verification_suite(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CheckResult> out;
  example_identities(out);
  root_sum_bounds(rng, out);
  quadratic_implication(rng, out);
  projection_properties(rng, out);
  proxy_unbiased(rng, out);
  sigma_monotone(rng, out);
  proxy_gap_bound(rng, out);
  return out;
}

}  // namespace adastep
