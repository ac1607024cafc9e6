#include "adastep/cli.hpp"
#include "adastep/config.hpp"
#include "adastep/diagnostics.hpp"
#include "adastep/export.hpp"
#include "adastep/quadratic.hpp"
#include "adastep/runner.hpp"
#include "adastep/trace.hpp"
#include "adastep/verification.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace adastep;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json config_doc(const std::string &algo, std::uint64_t seed = 1) {
  return json{{"schema", "adastep-config/1"},
              {"problem",
               {{"type", "quadratic"}, {"regime", "general_convex"}, {"interpolated", true}, {"n", 8}, {"d", 24}}},
              {"algorithm", {{"name", algo}}},
              {"batch_size", 2},
              {"budget", {{"epochs", 6}}},
              {"seed", seed}};
}

LabeledTrace labeled(const std::string &algo, std::uint64_t seed, std::uint64_t every = 0) {
  auto cfg = parse_config(config_doc(algo, seed));
  cfg.trace_every = every;
  return label_trace(run_experiment(cfg));
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "adastep-tests";
  fs::create_directories(dir);
  return dir;
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "adastep");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string &s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("diagnostics on the two-component example") {
  // f_1 = x^2/2, f_2 = (x - 2)^2/2: sigma = 1/2 for B = 1, L = 1.
  Mat a = Mat::Ones(2, 1), b(2, 1);
  b << 0, 2;
  auto problem = std::make_shared<DiagonalQuadraticProblem>(a, b);
  auto doc = config_doc("adasps");
  doc["batch_size"] = 1;
  RunOptions opts;
  opts.problem = problem;
  const Trace trace = run_experiment(parse_config(doc), opts);
  REQUIRE(trace.ok());
  const auto r = compute_diagnostics(*problem, 1, trace);
  CHECK(r.sigma_fB == doctest::Approx(0.5));
  CHECK(r.err_fB == 0.0);
  CHECK_FALSE(r.sampled);
  CHECK(r.smoothness == 1.0);
  CHECK(r.diameter_source == "ball");
  CHECK(r.diameter_sq == doctest::Approx(4e4));
  const double cp = trace.header["constants"]["c_p"].get<double>();
  CHECK(r.tau_kind == "tau_p");
  CHECK(r.tau == doctest::Approx(2 * cp * 1.0 * 4e4 + 1 / cp));
  const double T = trace.header["iterations"].get<double>();
  CHECK(r.averaged_bound == doctest::Approx(r.tau * r.tau / T + r.tau * std::sqrt(0.5) / std::sqrt(T)));
  CHECK(r.to_json()["tau_kind"] == "tau_p");
}

TEST_CASE("unconstrained strongly convex runs stay inside the derived radius") {
  auto doc = config_doc("adasps");
  doc["problem"]["regime"] = "strongly_convex";
  doc["problem"]["interpolated"] = false;
  doc["projection"] = {{"kind", "unconstrained"}};
  const auto cfg = parse_config(doc);
  const auto problem = build_problem(cfg.problem);
  const Trace trace = run_experiment(cfg);
  const auto r = compute_diagnostics(*problem, 2, trace);
  CHECK(r.has_dmax);
  CHECK(r.containment_checked);
  CHECK(r.containment_holds);
  CHECK(r.diameter_source == "dmax");
}

TEST_CASE("plot export without aggregation") {
  const std::string csv = export_plot_data({labeled("adasps", 1), labeled("sps", 1)}, Aggregate::none);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "algorithm,seed,t,epoch,suboptimality,suboptimality_avg,eta");
  CHECK(count_lines(csv) == 1 + 7 + 7);
  CHECK(csv.find("\nadasps,1,0,0,") != std::string::npos);
}

TEST_CASE("plot export mean and std over seeds") {
  const auto a = labeled("adasps", 1), b = labeled("adasps", 2);
  const std::string csv = export_plot_data({a, b}, Aggregate::mean_std);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "algorithm,epoch,seeds,suboptimality_mean,suboptimality_std,suboptimality_avg_mean,"
                "suboptimality_avg_std,eta_mean,eta_std");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == a.trace.records.size());
  // Last row: check the mean and population std against the raw records.
  const double x = a.trace.records.back().suboptimality, y = b.trace.records.back().suboptimality;
  std::vector<std::string> cells;
  std::stringstream ss(rows.back());
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  CHECK(cells[0] == "adasps");
  CHECK(cells[2] == "2");
  CHECK(std::stod(cells[3]) == doctest::Approx((x + y) / 2));
  CHECK(std::stod(cells[4]) == doctest::Approx(std::abs(x - y) / 2));
}

TEST_CASE("misaligned traces are refused") {
  CHECK_THROWS_AS(export_plot_data({labeled("adasps", 1), labeled("adasps", 2, 3)}, Aggregate::mean_std),
                  AlignmentError);
  CHECK_THROWS_AS(aggregate_from_string("median"), ConfigError);
}

TEST_CASE("verification suite passes") {
  const auto checks = run_verification_suite(0);
  CHECK(checks.size() >= 10);
  for (const auto &c : checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.passed);
  }
}

TEST_CASE("helper inequalities on hand inputs") {
  const auto s = root_sums({1.0, 3.0});
  CHECK(s.root_total == doctest::Approx(2.0));
  CHECK(s.weighted == doctest::Approx(1.0 + 3.0 / 2.0));
  CHECK(quadratic_implication_holds(2.0, 1.0, 3.0));
  // Premise 9 <= 1 * (3 + 3) fails, so the implication holds vacuously.
  CHECK(quadratic_implication_holds(3.0, 1.0, 3.0));
  // Single-component Polyak step on a (x - c)^2 is 1 / (4a).
  CHECK(expected_polyak_step({{2.0, 1.0}}, 5.0) == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("command line: generate, run, diagnose, export") {
  const fs::path dir = scratch_dir();
  const std::string quad = (dir / "q.json").string();
  auto gen = cli({"generate", "--regime", "strongly_convex", "--n", "10", "--d", "4", "--seed", "2", "--out", quad});
  REQUIRE(gen.code == 0);
  CHECK(parse_quadratic([&] {
          std::ifstream in(quad);
          std::stringstream ss;
          ss << in.rdbuf();
          return ss.str();
        }())
            .content_hash() == generate_quadratic(QuadraticRegime::strongly_convex, false, 10, 4, 2).content_hash());

  json doc = config_doc("adasls");
  doc["problem"] = {{"type", "quadratic_file"}, {"path", "q.json"}};
  const std::string cfg_path = (dir / "run.json").string();
  std::ofstream(cfg_path) << doc.dump(2);
  const std::string trace_a = (dir / "a.trace").string(), trace_b = (dir / "b.trace").string();
  auto run = cli({"run", "--config", cfg_path, "--out", trace_a});
  REQUIRE(run.code == 0);
  CHECK(run.err.find("run finished") != std::string::npos);
  REQUIRE(cli({"run", "--config", cfg_path, "--seed", "9", "--out", trace_b}).code == 0);
  CHECK(read_trace_file(trace_b).header["config"]["seed"] == 9);

  auto diag = cli({"diagnose", "--trace", trace_a});
  CHECK(diag.code == 0);
  CHECK(json::parse(diag.out)["tau_kind"] == "tau_l");

  auto exp = cli({"export-plot", trace_a, trace_b, "--aggregate", "mean_std"});
  CHECK(exp.code == 0);
  CHECK(exp.out.rfind("algorithm,epoch,seeds,", 0) == 0);

  auto sweep = cli({"sweep", "--config", cfg_path, "--grid", "c_l_scale=0.5,1,2", "--seeds", "1,2"});
  CHECK(sweep.code == 0);
  CHECK(sweep.out.find("# runs: 6") != std::string::npos);
  CHECK(sweep.out.find("# best by mean final suboptimality: c_l_scale=") != std::string::npos);
}

TEST_CASE("command line: verify and error codes") {
  auto v = cli({"verify"});
  CHECK(v.code == 0);
  CHECK(v.out.find("FAIL") == std::string::npos);
  CHECK(cli({}).code == 2);
  CHECK(cli({"bogus"}).code == 2);
  CHECK(cli({"run"}).code == 2);
  auto missing = cli({"run", "--config", "/nonexistent.json"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("config error") != std::string::npos);
  const fs::path bad = scratch_dir() / "bad.trace";
  std::ofstream(bad) << "# adastep-trace/1\n# {}\nnot,a,header\n";
  CHECK(cli({"diagnose", "--trace", bad.string()}).code == 2);
  CHECK(cli({"sweep", "--config", "/nonexistent.json", "--grid", "c=1"}).code == 2);
}

TEST_CASE("command line: aborted run exits with 1") {
  const fs::path dir = scratch_dir();
  json doc = config_doc("sgd");
  doc["algorithm"]["eta0"] = 1e4;
  doc["problem"]["regime"] = "strongly_convex";
  doc["budget"] = {{"epochs", 200}};
  const std::string cfg_path = (dir / "diverge.json").string();
  std::ofstream(cfg_path) << doc.dump();
  auto r = cli({"run", "--config", cfg_path, "--out", (dir / "diverge.trace").string()});
  CHECK(r.code == 1);
  CHECK(read_trace_file((dir / "diverge.trace").string()).status.rfind("aborted", 0) == 0);
}
