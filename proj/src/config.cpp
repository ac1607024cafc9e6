#include "adastep/config.hpp"

#include "adastep/libsvm.hpp"
#include "adastep/linesearch.hpp"
#include "adastep/logistic.hpp"
#include "adastep/quadratic.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace adastep {

using nlohmann::json;

namespace {

const std::pair<Algorithm, const char *> kAlgorithmNames[] = {
    {Algorithm::sgd, "sgd"},
    {Algorithm::sps, "sps"},
    {Algorithm::sps_max, "sps_max"},
    {Algorithm::decsps, "decsps"},
    {Algorithm::adasps, "adasps"},
    {Algorithm::adasls, "adasls"},
    {Algorithm::sls, "sls"},
    {Algorithm::adagrad_norm, "adagrad_norm"},
    {Algorithm::adasps_dl, "adasps_dl"},
    {Algorithm::adasvrps, "adasvrps"},
    {Algorithm::adasvrls, "adasvrls"},
    {Algorithm::svrg, "svrg"},
};

/// Reads keys out of a JSON object, remembering which ones were consumed.
class ObjectReader {
 public:
  ObjectReader(const json &obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool has(const std::string &key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  const json &raw(const std::string &key) {
    if (!has(key)) throw ConfigError(where_ + ": missing key '" + key + "'");
    return obj_.at(key);
  }

  double number(const std::string &key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError(where_ + ": missing key '" + key + "'");
    }
    const json &v = obj_.at(key);
    if (!v.is_number()) throw ConfigError(where_ + "." + key + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where_ + "." + key + ": must be finite");
    return x;
  }

  double positive(const std::string &key, std::optional<double> fallback = std::nullopt) {
    const double x = number(key, fallback);
    if (!(x > 0.0)) throw ConfigError(where_ + "." + key + ": must be positive");
    return x;
  }

  std::uint64_t count(const std::string &key, std::optional<std::uint64_t> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError(where_ + ": missing key '" + key + "'");
    }
    const json &v = obj_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ConfigError(where_ + "." + key + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string &key, std::optional<bool> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError(where_ + ": missing key '" + key + "'");
    }
    const json &v = obj_.at(key);
    if (!v.is_boolean()) throw ConfigError(where_ + "." + key + ": expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string &key, std::optional<std::string> fallback = std::nullopt,
                   std::initializer_list<const char *> allowed = {}) {
    std::string s;
    if (!has(key)) {
      if (!fallback) throw ConfigError(where_ + ": missing key '" + key + "'");
      s = *fallback;
    } else {
      const json &v = obj_.at(key);
      if (!v.is_string()) throw ConfigError(where_ + "." + key + ": expected a string");
      s = v.get<std::string>();
    }
    if (allowed.size() > 0) {
      bool ok = false;
      for (const char *a : allowed) ok = ok || s == a;
      if (!ok) throw ConfigError(where_ + "." + key + ": unsupported value '" + s + "'");
    }
    return s;
  }

  /// Throws on any key that was never asked for.
  void finish() const {
    for (const auto &item : obj_.items())
      if (!seen_.count(item.key()))
        throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
  }

 private:
  const json &obj_;
  std::string where_;
  std::set<std::string> seen_;
};

json number_list(ObjectReader &r, const std::string &key, std::vector<double> fallback) {
  if (!r.has(key)) return json(fallback);
  const json &v = r.raw(key);
  if (!v.is_array() || v.empty()) throw ConfigError("problem." + key + ": expected a non-empty array");
  for (const auto &x : v)
    if (!x.is_number()) throw ConfigError("problem." + key + ": expected numbers");
  return v;
}

json normalize_problem(const json &given) {
  ObjectReader r(given, "problem");
  const std::string type = r.text("type", std::nullopt, {"quadratic", "quadratic_file", "libsvm"});
  json out;
  out["type"] = type;
  if (type == "quadratic") {
    out["regime"] = r.text("regime", std::nullopt, {"strongly_convex", "general_convex"});
    out["interpolated"] = r.boolean("interpolated");
    out["n"] = r.count("n", 50);
    out["d"] = r.count("d", 100);
    out["seed"] = r.count("seed", 0);
    const double p = r.number("mask_p", 0.1);
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("problem.mask_p must lie in (0, 1]");
    out["mask_p"] = p;
    out["lower_bound"] = r.text("lower_bound", "zero", {"zero", "exact"});
  } else if (type == "quadratic_file") {
    out["path"] = r.text("path");
    out["lower_bound"] = r.text("lower_bound", "zero", {"zero", "exact"});
  } else {
    out["path"] = r.text("path");
    out["max_rows"] = r.count("max_rows", 0);
    out["negative_labels"] = number_list(r, "negative_labels", {-1.0, 0.0});
    out["positive_labels"] = number_list(r, "positive_labels", {1.0});
  }
  r.finish();
  return out;
}

json normalize_budget(const json &given) {
  ObjectReader r(given, "budget");
  json out;
  const bool epochs = r.has("epochs");
  const bool evals = r.has("grad_evals");
  if (epochs == evals) throw ConfigError("budget: give exactly one of 'epochs' or 'grad_evals'");
  if (epochs)
    out["epochs"] = r.positive("epochs");
  else
    out["grad_evals"] = r.count("grad_evals");
  r.finish();
  return out;
}

json normalize_projection(const json &given) {
  ObjectReader r(given, "projection");
  json out;
  const std::string kind = r.text("kind", "auto", {"auto", "unconstrained", "ball"});
  out["kind"] = kind;
  if (kind == "ball") {
    out["radius"] = r.positive("radius", 100.0);
    out["center"] = r.text("center", "origin", {"origin", "x_star"});
  }
  r.finish();
  return out;
}

/// Either a fixed constant under `fixed_key` or a scale under `scale_key`.
void scale_or_fixed(ObjectReader &r, json &out, const char *scale_key, const char *fixed_key) {
  if (r.has(fixed_key)) {
    if (r.has(scale_key)) throw ConfigError(std::string("give either ") + scale_key + " or " + fixed_key);
    out[fixed_key] = r.positive(fixed_key);
    out[scale_key] = nullptr;
  } else {
    out[scale_key] = r.positive(scale_key, 1.0);
    out[fixed_key] = nullptr;
  }
}

void refresh_probability(ObjectReader &r, json &out) {
  const double a = r.number("a", 0.1);
  if (!(a >= 0.0 && a < 1.0)) throw ConfigError("algorithm.a must lie in [0, 1)");
  out["a"] = a;
  if (!r.has("p")) {
    out["p"] = nullptr;
    return;
  }
  const json &p = r.raw("p");
  if (p.is_string()) {
    if (p.get<std::string>() != "batch_ratio") throw ConfigError("algorithm.p: expected a number or \"batch_ratio\"");
    out["p"] = "batch_ratio";
  } else {
    const double v = r.number("p");
    if (!(v > 0.0 && v <= 1.0)) throw ConfigError("algorithm.p must lie in (0, 1]");
    out["p"] = v;
  }
}

void line_search(ObjectReader &r, json &out, double beta, double rho, double gamma_max) {
  out["beta"] = r.number("beta", beta);
  out["rho"] = r.number("rho", rho);
  out["gamma_max"] = r.positive("gamma_max", gamma_max);
  out["max_probes"] = r.count("max_probes", 200);
  LineSearchParams{out["beta"].get<double>(), out["rho"].get<double>(),
                   out["gamma_max"].get<double>(),
                   static_cast<std::uint32_t>(out["max_probes"].get<std::uint64_t>())}
      .validate();
}

}  // namespace

std::string to_string(Algorithm a) {
  for (const auto &[id, name] : kAlgorithmNames)
    if (id == a) return name;
  return "unknown";
}

Algorithm algorithm_from_string(const std::string &s) {
  for (const auto &[id, name] : kAlgorithmNames)
    if (s == name) return id;
  throw ConfigError("unknown algorithm '" + s + "'");
}

bool is_variance_reduced(Algorithm a) {
  return a == Algorithm::adasvrps || a == Algorithm::adasvrls || a == Algorithm::svrg;
}

json normalize_params(Algorithm algorithm, const json &given) {
  json obj = given.is_null() ? json::object() : given;
  ObjectReader r(obj, "algorithm");
  r.has("name");
  json out;
  switch (algorithm) {
    case Algorithm::sgd:
      out["schedule"] = r.text("schedule", "constant", {"constant", "inv_sqrt", "inv_t"});
      out["eta0"] = r.positive("eta0", 1e-2);
      break;
    case Algorithm::sps:
    case Algorithm::sps_max:
      out["c"] = r.positive("c", 0.5);
      out["f_star"] = r.text("f_star", "exact", {"exact", "lower_bound"});
      if (algorithm == Algorithm::sps_max) out["gamma_b"] = r.positive("gamma_b", 1e-3);
      break;
    case Algorithm::decsps:
      out["c0"] = r.positive("c0", 1.0);
      out["gamma_b"] = r.positive("gamma_b", 10.0);
      break;
    case Algorithm::adasps:
      scale_or_fixed(r, out, "c_p_scale", "c_p");
      break;
    case Algorithm::adasls:
      scale_or_fixed(r, out, "c_l_scale", "c_l");
      line_search(r, out, 0.8, 0.5, 10.0);
      break;
    case Algorithm::sls:
      line_search(r, out, 0.9, 0.1, 10.0);
      break;
    case Algorithm::adagrad_norm:
      out["c_g"] = r.positive("c_g", 1.0);
      out["b0"] = r.number("b0", 1e-10);
      break;
    case Algorithm::adasps_dl:
      out["c_p_scale"] = r.positive("c_p_scale", 1.0);
      out["update_every"] = r.count("update_every", 0);
      break;
    case Algorithm::adasvrps:
      scale_or_fixed(r, out, "c_p_scale", "c_p");
      out["mu_F"] = r.number("mu_F", 10.0);
      refresh_probability(r, out);
      out["bound"] = r.text("bound", "shifted", {"shifted", "exact"});
      break;
    case Algorithm::adasvrls:
      scale_or_fixed(r, out, "c_l_scale", "c_l");
      line_search(r, out, 0.8, 0.5, 0.1);
      out["mu_F"] = r.number("mu_F", 10.0);
      refresh_probability(r, out);
      break;
    case Algorithm::svrg:
      out["eta"] = r.positive("eta", 1e-2);
      out["epoch_length"] = r.count("epoch_length", 0);
      break;
  }
  if (out.contains("mu_F") && out["mu_F"].get<double>() < 0.0) throw ConfigError("algorithm.mu_F must be non-negative");
  r.finish();
  return out;
}

json ExperimentConfig::to_json() const {
  json algo = params;
  algo["name"] = to_string(algorithm);
  json doc;
  doc["schema"] = kConfigSchema;
  doc["problem"] = problem;
  doc["algorithm"] = algo;
  doc["batch_size"] = batch_size;
  doc["budget"] = budget;
  doc["seed"] = seed;
  doc["projection"] = projection;
  doc["trace_every"] = trace_every;
  doc["output"] = output;
  return doc;
}

ExperimentConfig parse_config(const json &doc) {
  ObjectReader r(doc, "config");
  const std::string schema = r.text("schema");
  if (schema != kConfigSchema) throw ConfigError("unsupported config schema '" + schema + "'");
  ExperimentConfig cfg;
  cfg.problem = normalize_problem(r.raw("problem"));
  const json &algo = r.raw("algorithm");
  if (!algo.is_object() || !algo.contains("name") || !algo["name"].is_string())
    throw ConfigError("algorithm: expected an object with a 'name'");
  cfg.algorithm = algorithm_from_string(algo["name"].get<std::string>());
  cfg.params = normalize_params(cfg.algorithm, algo);
  cfg.batch_size = r.count("batch_size", 1);
  if (cfg.batch_size == 0) throw ConfigError("batch_size must be positive");
  cfg.budget = normalize_budget(r.raw("budget"));
  cfg.seed = r.count("seed", 0);
  cfg.projection = normalize_projection(r.has("projection") ? r.raw("projection") : json::object());
  cfg.trace_every = r.count("trace_every", 0);
  cfg.output = r.text("output", "");
  r.finish();
  return cfg;
}

ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

namespace {

std::string resolve_path(const std::string &path, const std::string &base_dir) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.is_absolute() || fs::exists(p)) return path;
  if (!base_dir.empty() && fs::exists(fs::path(base_dir) / p)) return (fs::path(base_dir) / p).string();
  const fs::path bundled = fs::path(ADASTEP_DATA_DIR) / p;
  if (fs::exists(bundled)) return bundled.string();
  throw ConfigError("file not found: '" + path + "'");
}

std::vector<double> doubles(const json &v) { return v.get<std::vector<double>>(); }

}  // namespace

std::shared_ptr<const FiniteSumProblem> build_problem(const json &given, const std::string &base_dir) {
  const json problem = normalize_problem(given);
  const std::string type = problem.at("type").get<std::string>();
  if (type == "quadratic" || type == "quadratic_file") {
    std::shared_ptr<DiagonalQuadraticProblem> q;
    if (type == "quadratic") {
      q = std::make_shared<DiagonalQuadraticProblem>(generate_quadratic(
          quadratic_regime_from_string(problem.at("regime").get<std::string>()),
          problem.at("interpolated").get<bool>(), problem.at("n").get<Index>(),
          problem.at("d").get<Index>(), problem.at("seed").get<std::uint64_t>(),
          problem.at("mask_p").get<double>()));
    } else {
      const std::string path = resolve_path(problem.at("path").get<std::string>(), base_dir);
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot read problem file '" + path + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      q = std::make_shared<DiagonalQuadraticProblem>(parse_quadratic(ss.str()));
    }
    q->set_lower_bound_mode(problem.at("lower_bound").get<std::string>() == "exact" ? LowerBoundMode::exact
                                                                                   : LowerBoundMode::zero);
    return q;
  }
  if (type == "libsvm") {
    LabelMap labels{doubles(problem.at("negative_labels")), doubles(problem.at("positive_labels"))};
    SparseDataset data = read_libsvm_file(resolve_path(problem.at("path").get<std::string>(), base_dir), labels);
    const Index max_rows = problem.at("max_rows").get<Index>();
    if (max_rows > 0) data = data.head(max_rows);
    return std::make_shared<LogisticRegressionProblem>(std::move(data));
  }
  throw ConfigError("unknown problem type '" + type + "'");
}

json resolve_projection(const json &projection, const FiniteSumProblem &problem) {
  if (projection.at("kind").get<std::string>() != "auto") return projection;
  const auto *q = dynamic_cast<const DiagonalQuadraticProblem *>(&problem);
  if (q && q->meta().interpolated) return json{{"kind", "unconstrained"}};
  return json{{"kind", "ball"}, {"radius", 100.0}, {"center", "origin"}};
}

ProjectionDomain build_projection(const json &resolved, const FiniteSumProblem &problem) {
  const std::string kind = resolved.at("kind").get<std::string>();
  if (kind == "unconstrained") return ProjectionDomain::unconstrained();
  if (kind != "ball") throw ConfigError("projection must be resolved before use");
  Vec center = Vec::Zero(static_cast<Eigen::Index>(problem.dim()));
  if (resolved.at("center").get<std::string>() == "x_star") center = problem.reference_optimum().x_star;
  return ProjectionDomain::ball(std::move(center), resolved.at("radius").get<double>());
}

std::uint64_t budget_limit(const json &budget, Index n) {
  if (budget.contains("grad_evals")) return budget.at("grad_evals").get<std::uint64_t>();
  return static_cast<std::uint64_t>(std::ceil(budget.at("epochs").get<double>() * static_cast<double>(n)));
}

}  // namespace adastep
