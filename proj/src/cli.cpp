#include "adastep/cli.hpp"

#include "adastep/config.hpp"
#include "adastep/diagnostics.hpp"
#include "adastep/export.hpp"
#include "adastep/libsvm.hpp"
#include "adastep/quadratic.hpp"
#include "adastep/runner.hpp"
#include "adastep/steppers.hpp"
#include "adastep/verification.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace adastep {

using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridAxis {
  std::string key;
  std::vector<double> values;
};

double parse_number(const std::string &s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception &) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

/// "key=lo..hi" spans the powers of ten from lo to hi; "key=v1,v2,..." lists values.
GridAxis parse_grid(const std::string &spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("grid must look like key=values: '" + spec + "'");
  GridAxis axis{spec.substr(0, eq), {}};
  const std::string rest = spec.substr(eq + 1);
  if (const auto dots = rest.find(".."); dots != std::string::npos) {
    const double lo = parse_number(rest.substr(0, dots));
    const double hi = parse_number(rest.substr(dots + 2));
    const double elo = std::log10(lo);
    const double ehi = std::log10(hi);
    if (!(lo > 0.0) || !(hi >= lo) || elo != std::round(elo) || ehi != std::round(ehi))
      throw UsageError("range grids need powers of ten lo <= hi: '" + spec + "'");
    for (long e = std::lround(elo); e <= std::lround(ehi); ++e)
      axis.values.push_back(parse_number("1e" + std::to_string(e)));
  } else {
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) axis.values.push_back(parse_number(item));
  }
  if (axis.values.empty()) throw UsageError("empty grid: '" + spec + "'");
  return axis;
}

std::vector<std::uint64_t> parse_seeds(const std::string &s) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw UsageError("bad seed list '" + s + "'");
    }
  }
  if (seeds.empty()) throw UsageError("empty seed list");
  return seeds;
}

std::string config_dir(const std::string &path) {
  return std::filesystem::path(path).parent_path().string();
}

void emit(const std::string &path, const std::string &content, std::ostream &out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  write_file_atomic(resolve_output_path(path), content);
}

std::string final_line(const Trace &trace) {
  if (trace.records.empty()) return "no records";
  const TraceRecord &r = trace.records.back();
  std::ostringstream o;
  o << "t=" << r.t << " epoch=" << format_double(r.epoch) << " suboptimality=" << format_double(r.suboptimality);
  return o.str();
}

int cmd_generate(const std::string &regime, bool interpolated, Index n, Index d, std::uint64_t seed,
                 double mask_p, const std::string &out_path, std::ostream &out) {
  const auto problem = generate_quadratic(quadratic_regime_from_string(regime), interpolated, n, d, seed, mask_p);
  emit(out_path, serialize_quadratic(problem), out);
  return 0;
}

int cmd_run(const std::string &config_path, std::optional<std::uint64_t> seed, const std::string &out_path,
            std::ostream &out, std::ostream &err) {
  ExperimentConfig cfg = load_config(config_path);
  if (seed) cfg.seed = *seed;
  RunOptions opts;
  opts.base_dir = config_dir(config_path);
  const Trace trace = run_experiment(cfg, opts);
  emit(out_path.empty() ? cfg.output : out_path, format_trace(trace), out);
  if (!trace.ok()) {
    err << "run " << trace.status << '\n';
    return 1;
  }
  err << "run finished: " << final_line(trace) << '\n';
  return 0;
}

int cmd_sweep(const std::string &config_path, const std::vector<std::string> &grids, const std::string &seeds_spec,
              const std::string &out_dir, std::ostream &out) {
  const ExperimentConfig base = load_config(config_path);
  std::vector<GridAxis> axes;
  for (const auto &g : grids) axes.push_back(parse_grid(g));
  const std::vector<std::uint64_t> seeds = seeds_spec.empty() ? std::vector<std::uint64_t>{base.seed}
                                                              : parse_seeds(seeds_spec);
  RunOptions opts;
  opts.base_dir = config_dir(config_path);
  opts.problem = build_problem(base.problem, opts.base_dir);

  std::vector<std::size_t> pos(axes.size(), 0);
  struct Cell {
    std::string label;
    double final_mean = 0.0;
    double best_mean = 0.0;
    bool ok = true;
  };
  std::vector<Cell> cells;
  out << "# sweep over " << axes.size() << " axis(es), " << seeds.size() << " seed(s)\n";
  out << "setting,seed,status,final_suboptimality,best_suboptimality\n";
  while (true) {
    json params = base.params;
    std::string label;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      params[axes[a].key] = axes[a].values[pos[a]];
      label += (a ? ";" : "") + axes[a].key + "=" + format_double(axes[a].values[pos[a]]);
    }
    ExperimentConfig cfg = base;
    cfg.params = normalize_params(cfg.algorithm, params);
    Cell cell{label.empty() ? "base" : label};
    for (std::uint64_t s : seeds) {
      cfg.seed = s;
      const Trace trace = run_experiment(cfg, opts);
      double final_sub = kInfinity;
      double best = kInfinity;
      if (trace.ok() && !trace.records.empty()) {
        final_sub = trace.records.back().suboptimality;
        for (const auto &r : trace.records) best = std::min(best, r.suboptimality);
      }
      cell.ok = cell.ok && trace.ok();
      cell.final_mean += final_sub / static_cast<double>(seeds.size());
      cell.best_mean += best / static_cast<double>(seeds.size());
      out << cell.label << ',' << s << ',' << (trace.ok() ? "ok" : "aborted") << ',' << format_double(final_sub)
          << ',' << format_double(best) << '\n';
      if (!out_dir.empty()) {
        std::string name = to_string(cfg.algorithm) + "_" + cell.label + "_seed" + std::to_string(s) + ".trace";
        for (char &ch : name)
          if (ch == ';') ch = '_';
        write_file_atomic(resolve_output_path((std::filesystem::path(out_dir) / name).string()), format_trace(trace));
      }
    }
    cells.push_back(cell);
    std::size_t a = 0;
    while (a < axes.size() && ++pos[a] == axes[a].values.size()) pos[a++] = 0;
    if (a == axes.size()) break;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < cells.size(); ++i)
    if (cells[i].final_mean < cells[best].final_mean) best = i;
  out << "# runs: " << cells.size() * seeds.size() << '\n';
  out << "# best by mean final suboptimality: " << cells[best].label << " (final "
      << format_double(cells[best].final_mean) << ", best-seen " << format_double(cells[best].best_mean) << ")\n";
  return 0;
}

int cmd_diagnose(const std::string &trace_path, std::uint64_t samples, std::ostream &out) {
  const Trace trace = read_trace_file(trace_path);
  const ExperimentConfig cfg = parse_config(trace.header.at("config"));
  const auto problem = build_problem(cfg.problem, config_dir(trace_path));
  if (problem->content_hash() != trace.header.at("problem").at("hash").get<std::string>())
    throw ConfigError("problem content hash does not match the trace header");
  const DiagnosticsReport report = compute_diagnostics(*problem, cfg.batch_size, trace, samples);
  out << report.to_json().dump(2) << '\n';
  return report.containment_holds ? 0 : 1;
}

int cmd_verify(std::uint64_t seed, std::ostream &out) {
  bool all = true;
  for (const CheckResult &c : run_verification_suite(seed)) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
    all = all && c.passed;
  }
  return all ? 0 : 1;
}

int cmd_export(const std::vector<std::string> &paths, const std::string &aggregate, const std::string &out_path,
               std::ostream &out) {
  std::vector<LabeledTrace> traces;
  for (const auto &p : paths) traces.push_back(label_trace(read_trace_file(p)));
  emit(out_path, export_plot_data(traces, aggregate_from_string(aggregate)), out);
  return 0;
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Adaptive Polyak and line-search stepsizes: experiment runner"};
  app.require_subcommand(1);

  auto *gen = app.add_subcommand("generate", "Generate a synthetic quadratic problem");
  std::string regime = "strongly_convex";
  bool interpolated = false;
  Index gen_n = 50, gen_d = 100;
  std::uint64_t gen_seed = 0;
  double mask_p = 0.1;
  std::string gen_out;
  gen->add_option("--regime", regime, "strongly_convex or general_convex")
      ->check(CLI::IsMember({"strongly_convex", "general_convex"}));
  gen->add_flag("--interpolated", interpolated, "Share one center across components");
  gen->add_option("--n", gen_n, "Number of components");
  gen->add_option("--d", gen_d, "Dimension");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--mask-p", mask_p, "Mask density for the general convex regime");
  gen->add_option("--out", gen_out, "Output file (stdout if omitted)");

  auto *run = app.add_subcommand("run", "Run one configured experiment");
  std::string run_config, run_out;
  std::optional<std::uint64_t> run_seed;
  run->add_option("--config", run_config, "Config file")->required();
  run->add_option("--seed", run_seed, "Override the config seed");
  run->add_option("--out", run_out, "Trace file (config output or stdout if omitted)");

  auto *sweep = app.add_subcommand("sweep", "Grid sweep over algorithm hyperparameters");
  std::string sweep_config, seeds_spec, sweep_dir;
  std::vector<std::string> grids;
  sweep->add_option("--config", sweep_config, "Base config file")->required();
  sweep->add_option("--grid", grids, "key=lo..hi (powers of ten) or key=v1,v2,...")->required();
  sweep->add_option("--seeds", seeds_spec, "Comma-separated seeds");
  sweep->add_option("--out-dir", sweep_dir, "Directory for per-run traces");

  auto *diag = app.add_subcommand("diagnose", "Diagnostics report for a trace");
  std::string diag_trace;
  std::uint64_t samples = 2000;
  diag->add_option("--trace", diag_trace, "Trace file")->required();
  diag->add_option("--samples", samples, "Monte-Carlo batches when enumeration is too large");

  auto *verify = app.add_subcommand("verify", "Run the built-in property checks");
  std::uint64_t verify_seed = 0;
  verify->add_option("--seed", verify_seed, "Seed for the randomized checks");

  auto *exp = app.add_subcommand("export-plot", "Convert traces to a tidy CSV");
  std::vector<std::string> exp_paths;
  std::string aggregate = "none", exp_out;
  exp->add_option("traces", exp_paths, "Trace files")->required();
  exp->add_option("--aggregate", aggregate, "none or mean_std")->check(CLI::IsMember({"none", "mean_std"}));
  exp->add_option("--out", exp_out, "Output CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_generate(regime, interpolated, gen_n, gen_d, gen_seed, mask_p, gen_out, out);
    if (*run) return cmd_run(run_config, run_seed, run_out, out, err);
    if (*sweep) return cmd_sweep(sweep_config, grids, seeds_spec, sweep_dir, out);
    if (*diag) return cmd_diagnose(diag_trace, samples, out);
    if (*verify) return cmd_verify(verify_seed, out);
    if (*exp) return cmd_export(exp_paths, aggregate, exp_out, out);
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError &e) {
    err << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace adastep
