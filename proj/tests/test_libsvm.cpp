#include "adastep/libsvm.hpp"
#include "adastep/logistic.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace adastep;

namespace {

std::string slurp(const std::string &path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t error_line(const std::string &path) {
  std::ifstream in(path);
  try {
    parse_libsvm(in);
  } catch (const ParseError &e) {
    return e.line();
  }
  return 0;
}

SparseDataset parse_text(const std::string &text, const LabelMap &labels = {}) {
  std::istringstream in(text);
  return parse_libsvm(in, labels);
}

}  // namespace

TEST_CASE("parses indices, values and labels") {
  const auto d = parse_text("+1 1:0.5 3:2\n-1 2:1\n0 4:-1.5\n");
  CHECK(d.rows() == 3);
  CHECK(d.dim == 4);
  CHECK(d.labels == std::vector<int>{1, -1, -1});
  CHECK(d.columns == std::vector<std::uint32_t>{0, 2, 1, 3});
  CHECK(d.values == std::vector<double>{0.5, 2, 1, -1.5});
  CHECK(d.row_start == std::vector<std::size_t>{0, 2, 3, 4});
  Vec x(4);
  x << 1, 2, 3, 4;
  CHECK(d.dot(0, x) == 0.5 + 6);
  CHECK(d.row_norm_sq(0) == 4.25);
}

TEST_CASE("label mapping is configurable") {
  LabelMap map{{2.0}, {4.0}};
  const auto d = parse_text("2 1:1\n4 1:1\n", map);
  CHECK(d.labels == std::vector<int>{-1, 1});
  CHECK_THROWS_AS(parse_text("1 1:1\n", map), ParseError);
}

TEST_CASE("blank lines and trailing whitespace") {
  CHECK_THROWS_AS(parse_text("+1 1:1\n\n-1 1:1\n"), ParseError);
  const auto d = parse_text("+1 1:1  \r\n-1 2:3\n");
  CHECK(d.rows() == 2);
  const auto empty_row = parse_text("+1\n-1 1:1\n");
  CHECK(empty_row.row_end(0) == empty_row.row_begin(0));
}

TEST_CASE("malformed fixtures report the offending line") {
  const std::string dir = std::string(ADASTEP_TEST_DATA_DIR) + "/malformed/";
  CHECK(error_line(dir + "bad_label.libsvm") == 3);
  CHECK(error_line(dir + "zero_index.libsvm") == 2);
  CHECK(error_line(dir + "decreasing_index.libsvm") == 4);
  CHECK(error_line(dir + "missing_colon.libsvm") == 1);
  CHECK(error_line(dir + "bad_value.libsvm") == 5);
}

TEST_CASE("bundled corpora round-trip byte for byte") {
  for (const char *name : {"mini.libsvm", "synthetic2000.libsvm"}) {
    CAPTURE(name);
    const std::string path = std::string(ADASTEP_DATA_DIR) + "/" + name;
    const std::string text = slurp(path);
    const auto d = read_libsvm_file(path);
    CHECK(serialize_libsvm(d) == text);
    CHECK(parse_text(serialize_libsvm(d)) == d);
  }
  const auto big = read_libsvm_file(std::string(ADASTEP_DATA_DIR) + "/synthetic2000.libsvm");
  CHECK(big.rows() == 2000);
  CHECK(big.dim == 120);
  CHECK(big.head(10).rows() == 10);
  CHECK(big.head(5000).rows() == 2000);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.591, 1.0, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.25) == "0.25");
}

TEST_CASE("unreadable file") {
  CHECK_THROWS(read_libsvm_file("/nonexistent/file.libsvm"));
}

TEST_CASE("softplus and sigmoid are stable") {
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(softplus(800.0) == 800.0);
  CHECK(softplus(-800.0) >= 0.0);
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(std::isfinite(softplus(1e308)));
}

TEST_CASE("logistic values and gradients") {
  const auto d = parse_text("+1 1:1 2:2\n-1 2:1 3:-1\n+1 1:0.5 3:1\n");
  const LogisticRegressionProblem p(d);
  CHECK(p.regularization() == doctest::Approx(1.0 / 6.0));
  Vec x(3);
  x << 0.2, -0.1, 0.4;
  // f_0 = log(1 + exp(-(0.2 - 0.2))) + ||x||^2 / 6
  CHECK(p.component_value(0, x) == doctest::Approx(std::log(2.0) + 0.21 / 6.0));
  const double h = 1e-6;
  for (Index i = 0; i < 3; ++i) {
    Vec g = Vec::Zero(3);
    p.add_component_gradient(i, x, 1.0, g);
    for (Eigen::Index k = 0; k < 3; ++k) {
      Vec a = x, b = x;
      a[k] += h;
      b[k] -= h;
      CHECK(g[k] == doctest::Approx((p.component_value(i, a) - p.component_value(i, b)) / (2 * h)).epsilon(1e-6));
    }
  }
  CHECK(*p.strong_convexity() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("logistic reference optimum is stationary") {
  const auto d = read_libsvm_file(std::string(ADASTEP_DATA_DIR) + "/mini.libsvm");
  const LogisticRegressionProblem p(d);
  const auto ref = p.reference_optimum();
  CHECK(p.objective_gradient(ref.x_star).norm() <= 1e-10);
  CHECK(p.objective(ref.x_star) == doctest::Approx(ref.f_star));
  // Smoothness bound: every component Hessian is at most |a|^2 / 4 + 2 reg.
  Rng r(2);
  for (int trial = 0; trial < 20; ++trial) {
    Vec x(d.dim), v(d.dim);
    for (auto &e : x) e = r.normal(0, 2);
    for (auto &e : v) e = r.normal(0, 1);
    v /= v.norm();
    const Index i = r.uniform_index(d.rows());
    const double h = 1e-4;
    const double curv = (p.component_value(i, x + h * v) - 2 * p.component_value(i, x) +
                         p.component_value(i, x - h * v)) / (h * h);
    CHECK(curv <= *p.smoothness() * (1 + 1e-4));
  }
}

TEST_CASE("batch minimum lies below the batch value everywhere") {
  const auto d = read_libsvm_file(std::string(ADASTEP_DATA_DIR) + "/mini.libsvm");
  const LogisticRegressionProblem p(d);
  const Batch batch{0, 3, 7};
  const double m = *p.batch_min(batch);
  CHECK(m >= 0.0);
  CHECK(m <= p.batch_value(batch, Vec::Zero(d.dim)));
  const auto newton = logistic_newton(d, batch, p.regularization(), 1e-10);
  CHECK(newton.grad_norm <= 1e-10);
  CHECK(m == doctest::Approx(newton.value).epsilon(1e-12));
}
