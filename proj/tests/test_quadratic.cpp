#include "adastep/optimal_gap.hpp"
#include "adastep/projection.hpp"
#include "adastep/quadratic.hpp"

#include <doctest.h>

#include <cmath>

using namespace adastep;

namespace {

// Central differences; exact up to rounding for quadratics.
Vec numeric_gradient(const std::function<double(const Vec &)> &f, const Vec &x, double h = 1e-4) {
  Vec g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Vec p = x, m = x;
    p[k] += h;
    m[k] -= h;
    g[k] = (f(p) - f(m)) / (2 * h);
  }
  return g;
}

DiagonalQuadraticProblem tiny() {
  Mat a(2, 2);
  a << 1, 2, 3, 0;
  Mat b(2, 2);
  b << 0, 1, 2, -1;
  return DiagonalQuadraticProblem(a, b);
}

}  // namespace

TEST_CASE("hand-computed component values") {
  const auto p = tiny();
  Vec x(2);
  x << 1, 1;
  // f_0 = 1/2 (1*1 + 2*0) ; f_1 = 1/2 (3*1 + 0)
  CHECK(p.component_value(0, x) == doctest::Approx(0.5));
  CHECK(p.component_value(1, x) == doctest::Approx(1.5));
  CHECK(p.objective(x) == doctest::Approx(1.0));
  CHECK(*p.smoothness() == 3.0);
  CHECK_FALSE(p.strong_convexity().has_value());
}

TEST_CASE("quadratic gradients match finite differences") {
  const auto p = generate_quadratic(QuadraticRegime::strongly_convex, false, 6, 8, 5);
  Rng r(1);
  Vec x(8);
  for (auto &v : x) v = r.normal(0, 3);
  const Batch batch{1, 4};
  const Vec g = p.batch_gradient(batch, x);
  const Vec fd = numeric_gradient([&](const Vec &y) { return p.batch_value(batch, y); }, x);
  CHECK((g - fd).norm() < 1e-6 * (1 + g.norm()));
  const Vec gf = p.objective_gradient(x);
  const Vec fdf = numeric_gradient([&](const Vec &y) { return p.objective(y); }, x);
  CHECK((gf - fdf).norm() < 1e-6 * (1 + gf.norm()));
}

TEST_CASE("strongly convex generator pins the Hessian spectrum") {
  const auto p = generate_quadratic(QuadraticRegime::strongly_convex, false, 50, 100, 0);
  const Vec h = p.mean_curvature();
  CHECK(h.minCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.maxCoeff() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(h[98] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h[99] == doctest::Approx(10.0).epsilon(1e-12));
  for (Eigen::Index k = 0; k < 98; ++k) {
    CHECK(p.curvature().col(k).minCoeff() >= 1.0);
    CHECK(p.curvature().col(k).maxCoeff() <= 10.0);
  }
  CHECK(*p.strong_convexity() == p.curvature().minCoeff());
}

TEST_CASE("general convex generator masks and rescales columns") {
  const auto p = generate_quadratic(QuadraticRegime::general_convex, false, 50, 100, 0);
  const Vec h = p.mean_curvature();
  for (int k = 0; k < 20; ++k) CHECK(h[k] == doctest::Approx(std::ldexp(1.0, k - 20)).epsilon(1e-12));
  CHECK(h[99] == doctest::Approx(10.0).epsilon(1e-12));
  Index zeros = 0;
  for (Eigen::Index k = 0; k < 100; ++k) {
    CHECK((p.curvature().col(k).array() > 0).count() >= 1);
    zeros += (p.curvature().col(k).array() == 0).count();
  }
  // Bernoulli(0.1) mask: about 90% zeros.
  CHECK(zeros / 5000.0 == doctest::Approx(0.9).epsilon(0.05));
  CHECK_FALSE(p.strong_convexity().has_value());
}

TEST_CASE("interpolated instances share one center") {
  const auto p = generate_quadratic(QuadraticRegime::general_convex, true, 10, 30, 4);
  for (Eigen::Index i = 1; i < 10; ++i) CHECK(p.centers().row(i) == p.centers().row(0));
  const auto ref = p.reference_optimum();
  CHECK(ref.f_star == 0.0);
  CHECK(p.objective(ref.x_star) == 0.0);
  for (Index i = 0; i < 10; ++i) CHECK(*p.batch_min(Batch{i}) == 0.0);
}

TEST_CASE("reference optimum is the weighted mean of centers") {
  const auto p = tiny();
  const auto ref = p.reference_optimum();
  // Coordinate 0: (1*0 + 3*2)/4 = 1.5; coordinate 1: only component 0 curves, x = 1.
  CHECK(ref.x_star[0] == doctest::Approx(1.5));
  CHECK(ref.x_star[1] == doctest::Approx(1.0));
  // f* = 1/2 * 1/2 (1*1.5^2 + 3*0.5^2) = 0.75
  CHECK(ref.f_star == doctest::Approx(0.75));
  CHECK(p.objective_gradient(ref.x_star).norm() < 1e-12);
}

TEST_CASE("generator is deterministic in the seed") {
  const auto a = generate_quadratic(QuadraticRegime::general_convex, false, 20, 30, 9);
  const auto b = generate_quadratic(QuadraticRegime::general_convex, false, 20, 30, 9);
  const auto c = generate_quadratic(QuadraticRegime::general_convex, false, 20, 30, 10);
  CHECK(a.content_hash() == b.content_hash());
  CHECK(a.content_hash() != c.content_hash());
}

TEST_CASE("quadratic serialization round-trips bit-exactly") {
  const auto p = generate_quadratic(QuadraticRegime::strongly_convex, false, 7, 5, 2);
  const std::string text = serialize_quadratic(p);
  const auto q = parse_quadratic(text);
  CHECK(q.curvature() == p.curvature());
  CHECK(q.centers() == p.centers());
  CHECK(q.content_hash() == p.content_hash());
  CHECK(serialize_quadratic(q) == text);
  CHECK_THROWS(parse_quadratic("{\"schema\": \"nope\"}"));
  CHECK_THROWS(parse_quadratic("not json"));
}

TEST_CASE("constructor rejects bad shapes and curvature") {
  CHECK_THROWS_AS(DiagonalQuadraticProblem(Mat::Ones(2, 3), Mat::Ones(2, 2)), ConfigError);
  Mat neg = Mat::Ones(2, 2);
  neg(1, 1) = -1;
  CHECK_THROWS_AS(DiagonalQuadraticProblem(neg, Mat::Zero(2, 2)), ConfigError);
}

TEST_CASE("batch minimum and lower-bound modes") {
  auto p = tiny();
  // Batch {0,1} is the full objective.
  CHECK(*p.batch_min(Batch{0, 1}) == doctest::Approx(0.75));
  CHECK(*p.batch_min(Batch{0}) == 0.0);
  CHECK(p.batch_lower_bound(Batch{0, 1}) == 0.0);
  p.set_lower_bound_mode(LowerBoundMode::exact);
  CHECK(p.batch_lower_bound(Batch{0, 1}) == doctest::Approx(0.75));
}

TEST_CASE("proxy minimum agrees with a dense grid") {
  Mat a(1, 1), b(1, 1);
  a << 2.0;
  b << 1.0;
  const DiagonalQuadraticProblem p(a, b);
  Vec g(1), anchor(1);
  g << 0.5;
  anchor << -1.0;
  const double mu = 3.0;
  double best = 1e300;
  for (int k = -40000; k <= 40000; ++k) {
    const double x = k * 1e-4;
    best = std::min(best, 0.5 * 2.0 * (x - 1) * (x - 1) + x * 0.5 + 0.5 * mu * (x + 1) * (x + 1));
  }
  CHECK(p.proxy_min(Batch{0}, g, anchor, mu) == doctest::Approx(best).epsilon(1e-7));
  Mat flat = Mat::Zero(1, 1);
  const DiagonalQuadraticProblem q(flat, b);
  CHECK_THROWS_AS(q.proxy_min(Batch{0}, g, anchor, 0.0), NumericError);
}

TEST_CASE("oracle counts evaluations") {
  const auto p = tiny();
  Oracle o(p);
  Vec x = Vec::Zero(2);
  o.gradient(Batch{0}, x);
  o.gradient(Batch{0, 1}, x);
  o.value(Batch{1}, x);
  o.full_gradient(x);
  CHECK(o.counters().stochastic_grad_evals == 3);
  CHECK(o.counters().function_evals == 1);
  CHECK(o.counters().full_grad_evals == 1);
  CHECK(o.counters().gradient_cost(2) == 5);
  Vec bad(2);
  bad << std::nan(""), 0;
  CHECK_THROWS_AS(o.value(Batch{0}, bad), NumericError);
}

TEST_CASE("full batch equals the full gradient") {
  const auto p = generate_quadratic(QuadraticRegime::strongly_convex, false, 5, 4, 3);
  Oracle o(p);
  Vec x = Vec::Constant(4, 0.3);
  const Vec g = o.gradient(Batch{0, 1, 2, 3, 4}, x);
  const Vec gf = o.full_gradient(x);
  CHECK((g - gf).norm() < 1e-12);
  const auto comps = o.full_gradient_components(x);
  CHECK((comps.mean - gf).norm() < 1e-12);
  CHECK((comps.batch_mean(Batch{1, 3}) - p.batch_gradient(Batch{1, 3}, x)).norm() < 1e-12);
}

TEST_CASE("batch enumeration") {
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(50, 25) == 126410606437752ULL);
  CHECK(binomial(2, 3) == 0);
  int count = 0;
  CHECK(for_each_batch(5, 2, 0, 0, [&](const Batch &) { ++count; }));
  CHECK(count == 10);
  // Mean of the first index over all pairs of {0..4}: (0*4 + 1*3 + 2*2 + 3*1) / 10.
  CHECK(batch_expectation(5, 2, 0, 0, [](const Batch &b) { return double(b[0]); }) == doctest::Approx(1.0));
  CHECK(batch_maximum(5, 2, 0, 0, [](const Batch &b) { return double(b[1]); }) == 4.0);
  count = 0;
  CHECK_FALSE(for_each_batch(60, 30, 17, 1, [&](const Batch &) { ++count; }));
  CHECK(count == 17);
}

TEST_CASE("two-component optimal objective difference") {
  // f_1 = 1/2 x^2, f_2 = 1/2 (x - 2)^2: f* = 1/2 at x = 1, each f_i* = 0.
  Mat a = Mat::Ones(2, 1), b(2, 1);
  b << 0, 2;
  const DiagonalQuadraticProblem p(a, b);
  CHECK(sigma_f_B(p, p.reference_optimum().f_star, 1) == doctest::Approx(0.5));
  CHECK(sigma_f_B(p, p.reference_optimum().f_star, 2) == doctest::Approx(0.0));
  CHECK(err_f_B(p, 1) == 0.0);
}

TEST_CASE("ball projection") {
  const auto ball = ProjectionDomain::ball(Vec::Zero(2), 1.0);
  Vec x(2);
  x << 3, 4;
  const Vec y = project(ball, x);
  CHECK(y[0] == doctest::Approx(0.6));
  CHECK(y[1] == doctest::Approx(0.8));
  Vec inside(2);
  inside << 0.1, -0.2;
  CHECK(project(ball, inside) == inside);
  CHECK(ball.diameter() == 2.0);
  CHECK(std::isinf(ProjectionDomain::unconstrained().diameter()));
  CHECK(project(ProjectionDomain::unconstrained(), x) == x);
  CHECK_THROWS_AS(ProjectionDomain::ball(Vec::Zero(2), 0.0), ConfigError);
}
