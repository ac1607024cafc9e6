#include "adastep/runner.hpp"

#include "adastep/projection.hpp"
#include "adastep/steppers.hpp"
#include "adastep/varred.hpp"

#include <cmath>
#include <optional>

namespace adastep {

using nlohmann::json;

namespace {

enum Stream : std::uint64_t { kBatchStream = 1, kCoinStream = 2 };

json state_json(const StateMap &state) {
  json out = json::object();
  for (const auto &[k, v] : state) {
    if (std::isfinite(v))
      out[k] = v;
    else
      out[k] = v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  }
  return out;
}

LineSearchParams line_search_params(const json &p) {
  LineSearchParams ls{p.at("beta").get<double>(), p.at("rho").get<double>(), p.at("gamma_max").get<double>(),
                      static_cast<std::uint32_t>(p.at("max_probes").get<std::uint64_t>())};
  ls.validate();
  return ls;
}

ScaleCalibration calibration(const json &p, const char *scale_key, const char *fixed_key) {
  if (!p.at(fixed_key).is_null()) return ScaleCalibration::fixed(p.at(fixed_key).get<double>());
  return ScaleCalibration::from_scale(p.at(scale_key).get<double>());
}

std::uint64_t per_epoch(Index n, Index batch_size) { return (n + batch_size - 1) / batch_size; }

[[noreturn]] void check_failed(std::uint64_t t, const std::string &what) {
  throw NumericError("online check failed at t=" + std::to_string(t) + ": " + what);
}

/// Online invariants of the AdaSPS/AdaSLS stepsizes for L-smooth components.
struct SandwichChecker {
  bool enabled = false;
  double smoothness = 0.0;
  double eta_prev = kInfinity;

  void monotone(std::uint64_t t, double eta) {
    if (eta > eta_prev) check_failed(t, "stepsize increased");
    eta_prev = eta;
  }

  void polyak(std::uint64_t t, double eta, double gap, double grad_sq, double acc, double c) {
    if (!enabled || grad_sq == 0.0 || acc <= 0.0) return;
    monotone(t, eta);
    const double root = std::sqrt(acc);
    const double lower = 1.0 / (2.0 * c * smoothness * root);
    const double upper = gap / (c * grad_sq * root);
    if (eta < lower * (1.0 - kSandwichSlack)) check_failed(t, "AdaSPS stepsize below its smoothness bound");
    if (eta > upper * (1.0 + kSandwichSlack)) check_failed(t, "AdaSPS stepsize above its Polyak bound");
  }

  void armijo(std::uint64_t t, double gamma, const LineSearchParams &ls) {
    if (!enabled) return;
    const double floor = std::min((1.0 - ls.rho) / smoothness, ls.gamma_max);
    if (gamma < floor * (1.0 - kSandwichSlack)) check_failed(t, "line-search scale below (1 - rho) / L");
  }

  void linesearch(std::uint64_t t, double eta, double gamma, double grad_sq, double acc, double c,
                  const LineSearchParams &ls) {
    if (!enabled || grad_sq == 0.0 || acc <= 0.0) return;
    monotone(t, eta);
    const double root = std::sqrt(acc);
    const double lower = std::min((1.0 - ls.rho) / smoothness, ls.gamma_max) / (c * root);
    const double upper = gamma / (c * root);
    if (eta < lower * (1.0 - kSandwichSlack)) check_failed(t, "AdaSLS stepsize below its smoothness bound");
    if (eta > upper * (1.0 + kSandwichSlack)) check_failed(t, "AdaSLS stepsize above its line-search bound");
  }
};

class Runner {
 public:
  Runner(const ExperimentConfig &cfg, const RunOptions &opts)
      : cfg_(cfg),
        opts_(opts),
        problem_(opts.problem ? opts.problem : build_problem(cfg.problem, opts.base_dir)),
        n_(problem_->size()),
        oracle_(*problem_),
        sampler_(n_, cfg.batch_size, derive_seed(cfg.seed, kBatchStream)),
        coin_(derive_seed(cfg.seed, kCoinStream)),
        limit_(budget_limit(cfg.budget, n_)) {
    ref_ = problem_->reference_optimum();
    projection_ = resolve_projection(cfg.projection, *problem_);
    domain_ = build_projection(projection_, *problem_);
    x_ = Vec::Zero(static_cast<Eigen::Index>(problem_->dim()));
    x_sum_ = Vec::Zero(x_.size());
    if (auto L = problem_->smoothness(); L && opts.online_checks) {
      checker_.enabled = true;
      checker_.smoothness = *L;
    }
    setup_stepper();
  }

  Trace run() {
    trace_.header = header();
    try {
      if (is_variance_reduced(cfg_.algorithm)) {
        vr_ = VrRunState::start(oracle_, sampler_, coin_, x_);
        vr_->domain = domain_;
        vr_->schedule = schedule_;
        vr_->mu = mu_;
        vr_->bound = proxy_bound_;
      }
      record();
      while (oracle_.counters().gradient_cost(n_) < limit_) {
        if (vr_)
          vr_iteration();
        else
          plain_iteration();
        maybe_record();
      }
      if (last_recorded_ != t_) record();
    } catch (const NumericError &e) {
      trace_.status = std::string("aborted: ") + e.what();
    } catch (const LowerBoundError &e) {
      trace_.status = std::string("aborted: ") + e.what();
    }
    trace_.header["constants"] = constants();
    trace_.header["iterations"] = t_;
    trace_.final_x.assign(x_.data(), x_.data() + x_.size());
    const Vec x_bar = summed_ > 0 ? Vec(x_sum_ / static_cast<double>(summed_)) : x_;
    trace_.header["final"] = {{"objective", problem_->objective(x_)},
                              {"grad_norm", problem_->objective_gradient(x_).norm()},
                              {"avg_objective", problem_->objective(x_bar)},
                              {"avg_grad_norm", problem_->objective_gradient(x_bar).norm()}};
    return std::move(trace_);
  }

 private:
  void setup_stepper() {
    const json &p = cfg_.params;
    switch (cfg_.algorithm) {
      case Algorithm::sgd:
        schedule_kind_ = schedule_from_string(p.at("schedule").get<std::string>());
        eta0_ = p.at("eta0").get<double>();
        break;
      case Algorithm::sps:
        sps_.emplace(p.at("c").get<double>());
        exact_fstar_ = p.at("f_star").get<std::string>() == "exact";
        break;
      case Algorithm::sps_max:
        sps_.emplace(p.at("c").get<double>(), p.at("gamma_b").get<double>());
        exact_fstar_ = p.at("f_star").get<std::string>() == "exact";
        break;
      case Algorithm::decsps:
        decsps_.emplace(p.at("c0").get<double>(), p.at("gamma_b").get<double>());
        break;
      case Algorithm::adasps:
        adasps_.emplace(calibration(p, "c_p_scale", "c_p"));
        break;
      case Algorithm::adasls:
        ls_ = line_search_params(p);
        adasls_.emplace(calibration(p, "c_l_scale", "c_l"), ls_.rho);
        break;
      case Algorithm::sls:
        ls_ = line_search_params(p);
        break;
      case Algorithm::adagrad_norm:
        adagrad_.emplace(p.at("c_g").get<double>(), p.at("b0").get<double>());
        break;
      case Algorithm::adasps_dl: {
        std::uint64_t every = p.at("update_every").get<std::uint64_t>();
        if (every == 0) every = per_epoch(n_, cfg_.batch_size);
        adasps_dl_.emplace(p.at("c_p_scale").get<double>(), every);
        break;
      }
      case Algorithm::adasvrps:
        adasps_.emplace(calibration(p, "c_p_scale", "c_p"));
        vr_common(p);
        proxy_bound_ = p.at("bound").get<std::string>() == "exact" ? ProxyBound::exact
                                                                   : ProxyBound::shifted_lower_bound;
        break;
      case Algorithm::adasvrls:
        ls_ = line_search_params(p);
        adasls_.emplace(calibration(p, "c_l_scale", "c_l"), ls_.rho);
        vr_common(p);
        break;
      case Algorithm::svrg:
        eta0_ = p.at("eta").get<double>();
        svrg_epoch_ = p.at("epoch_length").get<std::uint64_t>();
        if (svrg_epoch_ == 0) svrg_epoch_ = per_epoch(n_, cfg_.batch_size);
        break;
    }
  }

  void vr_common(const json &p) {
    mu_ = p.at("mu_F").get<double>();
    schedule_.a = p.at("a").get<double>();
    const json &prob = p.at("p");
    if (prob.is_string())
      schedule_.fixed_p = static_cast<double>(cfg_.batch_size) / static_cast<double>(n_);
    else if (!prob.is_null())
      schedule_.fixed_p = prob.get<double>();
    schedule_.validate();
  }

  /// Lower bound for the batch; numerically computed minima are clamped to f
  /// when they exceed it by rounding only.
  double bound_for(const Batch &batch, double f, bool exact) const {
    double lb;
    if (exact) {
      const auto m = problem_->batch_min(batch);
      if (!m) throw ConfigError("this problem cannot supply exact minibatch optima");
      lb = *m;
    } else {
      lb = problem_->batch_lower_bound(batch);
    }
    if (lb > f && lb - f <= 1e-12 * std::max(1.0, std::abs(f))) lb = f;
    return lb;
  }

  void plain_iteration() {
    const Batch batch = sampler_.sample();
    const double f = oracle_.value(batch, x_);
    const Vec g = oracle_.gradient(batch, x_);
    const double grad_sq = g.squaredNorm();

    IterationInfo info;
    info.t = t_;
    info.batch = &batch;
    info.x = &x_;
    info.value = f;
    info.grad_sq = grad_sq;
    double eta = 0.0;

    auto search = [&]() {
      if (grad_sq == 0.0) return;
      info.search = backtracking_armijo([&](const Vec &y) { return oracle_.value(batch, y); }, f, grad_sq,
                                        x_, g, ls_);
      probes_ += info.search.probes;
      checker_.armijo(t_, info.search.gamma, ls_);
    };

    switch (cfg_.algorithm) {
      case Algorithm::sgd:
        eta = sgd_schedule_step(schedule_kind_, eta0_, t_);
        break;
      case Algorithm::sps:
      case Algorithm::sps_max:
        info.lower_bound = bound_for(batch, f, exact_fstar_);
        eta = sps_->step(f, info.lower_bound, grad_sq);
        break;
      case Algorithm::decsps:
        info.lower_bound = bound_for(batch, f, false);
        eta = decsps_->step(f, info.lower_bound, grad_sq);
        break;
      case Algorithm::adasps:
        info.lower_bound = bound_for(batch, f, false);
        eta = adasps_->step(f, info.lower_bound, grad_sq);
        info.accumulator = adasps_->accumulator();
        info.constant = adasps_->c_p().value();
        checker_.polyak(t_, eta, f - info.lower_bound, grad_sq, info.accumulator, info.constant);
        break;
      case Algorithm::adasps_dl:
        info.lower_bound = bound_for(batch, f, false);
        eta = adasps_dl_->step(f, info.lower_bound, grad_sq);
        info.accumulator = adasps_dl_->accumulator();
        info.constant = adasps_dl_->c_p();
        break;
      case Algorithm::adasls:
        search();
        eta = adasls_->step(info.search.gamma, grad_sq);
        info.accumulator = adasls_->accumulator();
        info.constant = adasls_->c_l().value();
        checker_.linesearch(t_, eta, info.search.gamma, grad_sq, info.accumulator, info.constant, ls_);
        break;
      case Algorithm::sls:
        search();
        eta = Sls{}.step(info.search);
        break;
      case Algorithm::adagrad_norm:
        eta = adagrad_->step(grad_sq);
        break;
      default:
        throw ConfigError("variance-reduced algorithm in the plain loop");
    }
    info.eta = eta;
    if (t_ == 0) first_readings(info);
    if (opts_.observer) opts_.observer(info);

    x_sum_ += x_;
    ++summed_;
    if (grad_sq > 0.0) x_ = project(domain_, x_ - eta * g);
    if (!all_finite(x_)) throw NumericError("iterate became non-finite at t=" + std::to_string(t_));
    last_eta_ = eta;
    last_grad_sq_ = grad_sq;
    ++t_;
  }

  void vr_iteration() {
    const Vec x_t = x_;
    VrStep step;
    switch (cfg_.algorithm) {
      case Algorithm::adasvrps:
        step = adasvrps_iteration(*vr_, *adasps_);
        break;
      case Algorithm::adasvrls:
        step = adasvrls_iteration(*vr_, *adasls_, ls_);
        probes_ += step.search.probes;
        break;
      default:
        step = svrg_iteration(*vr_, eta0_, svrg_epoch_);
        break;
    }
    IterationInfo info;
    info.t = t_;
    info.batch = &step.batch;
    info.x = &x_t;
    info.value = step.proxy_value;
    info.lower_bound = step.proxy_value - step.proxy_gap;
    info.grad_sq = step.grad_sq;
    info.eta = step.eta;
    info.search = step.search;
    info.refreshed = step.refreshed;
    if (adasps_) {
      info.accumulator = adasps_->accumulator();
      info.constant = adasps_->c_p().value();
    } else if (adasls_) {
      info.accumulator = adasls_->accumulator();
      info.constant = adasls_->c_l().value();
    }
    if (t_ == 0) first_readings(info);
    if (opts_.observer) opts_.observer(info);

    x_sum_ += x_t;
    ++summed_;
    x_ = vr_->x;
    last_eta_ = step.eta;
    last_grad_sq_ = step.grad_sq;
    ++t_;
  }

  void first_readings(const IterationInfo &info) {
    first_["eta0"] = info.eta;
    first_["first_gap"] = info.value - info.lower_bound;
    first_["first_grad_sq"] = info.grad_sq;
    first_["first_gamma"] = info.search.gamma;
  }

  void maybe_record() {
    if (cfg_.trace_every > 0) {
      if (t_ % cfg_.trace_every == 0) record();
      return;
    }
    if (oracle_.counters().gradient_cost(n_) >= next_epoch_mark_ * n_) record();
  }

  void record() {
    const OracleCounters &c = oracle_.counters();
    TraceRecord r;
    r.t = t_;
    r.epoch = static_cast<double>(c.gradient_cost(n_)) / static_cast<double>(n_);
    r.suboptimality = problem_->objective(x_) - ref_.f_star;
    const Vec x_bar = summed_ > 0 ? Vec(x_sum_ / static_cast<double>(summed_)) : x_;
    r.suboptimality_avg = problem_->objective(x_bar) - ref_.f_star;
    r.eta = last_eta_;
    r.grad_norm_sq = last_grad_sq_;
    r.dist_sq = ref_.x_star.size() == x_.size() ? (x_ - ref_.x_star).squaredNorm() : 0.0;
    r.stochastic_grad_evals = c.stochastic_grad_evals;
    r.full_grad_evals = c.full_grad_evals;
    r.function_evals = c.function_evals;
    r.probes = probes_;
    r.refreshes = vr_ ? vr_->refreshes : 0;
    if (!std::isfinite(r.suboptimality) || !std::isfinite(r.suboptimality_avg))
      throw NumericError("objective became non-finite at t=" + std::to_string(t_));
    if (r.suboptimality < -kSuboptimalitySlack || r.suboptimality_avg < -kSuboptimalitySlack)
      throw NumericError("suboptimality below the reference optimum at t=" + std::to_string(t_) +
                         "; the reference optimum is stale");
    trace_.records.push_back(r);
    last_recorded_ = t_;
    next_epoch_mark_ = c.gradient_cost(n_) / n_ + 1;
  }

  json header() const {
    json h;
    h["config"] = cfg_.to_json();
    json prob;
    prob["kind"] = problem_->kind();
    prob["hash"] = problem_->content_hash();
    prob["n"] = n_;
    prob["d"] = problem_->dim();
    const auto L = problem_->smoothness();
    prob["smoothness"] = L ? json(*L) : json(nullptr);
    const auto mu = problem_->strong_convexity();
    prob["strong_convexity"] = mu ? json(*mu) : json(nullptr);
    h["problem"] = prob;
    h["reference"] = {{"f_star", ref_.f_star}, {"method", ref_.method}};
    h["projection"] = projection_;
    h["x0"] = "zeros";
    h["rng"] = Rng::kAlgorithm;
    h["budget_grad_evals"] = limit_;
    h["cadence"] = {{"trace_every", cfg_.trace_every}};
    return h;
  }

  json constants() const {
    json c = json::object();
    if (adasps_) {
      c = state_json(adasps_->state());
      c["c_p_fell_back"] = adasps_->c_p().fell_back();
    }
    if (adasls_) {
      c = state_json(adasls_->state());
      c["c_l_fell_back"] = adasls_->c_l().fell_back();
    }
    if (adasps_dl_) c = state_json(adasps_dl_->state());
    if (decsps_) c = state_json(decsps_->state());
    if (sps_) c = state_json(sps_->state());
    if (adagrad_) c = state_json(adagrad_->state());
    if (cfg_.algorithm == Algorithm::sgd) c["eta0"] = eta0_;
    if (cfg_.algorithm == Algorithm::svrg) {
      c["eta"] = eta0_;
      c["epoch_length"] = svrg_epoch_;
    }
    if (is_variance_reduced(cfg_.algorithm)) {
      c["mu_F"] = mu_;
      c["refreshes"] = vr_ ? vr_->refreshes : 0;
      if (schedule_.fixed_p) c["p"] = *schedule_.fixed_p;
    }
    for (const auto &[k, v] : first_.items()) c[k] = v;
    return c;
  }

  const ExperimentConfig &cfg_;
  const RunOptions &opts_;
  std::shared_ptr<const FiniteSumProblem> problem_;
  Index n_;
  Oracle oracle_;
  Sampler sampler_;
  Rng coin_;
  std::uint64_t limit_;
  ReferenceOptimum ref_;
  json projection_;
  ProjectionDomain domain_;

  Vec x_;
  Vec x_sum_;
  std::uint64_t summed_ = 0;
  std::uint64_t t_ = 0;
  std::uint64_t probes_ = 0;
  std::uint64_t last_recorded_ = ~std::uint64_t{0};
  std::uint64_t next_epoch_mark_ = 1;
  double last_eta_ = 0.0;
  double last_grad_sq_ = 0.0;
  Trace trace_;
  json first_ = json::object();
  SandwichChecker checker_;

  Schedule schedule_kind_ = Schedule::constant;
  double eta0_ = 0.0;
  bool exact_fstar_ = false;
  LineSearchParams ls_;
  std::optional<Sps> sps_;
  std::optional<DecSps> decsps_;
  std::optional<AdaSps> adasps_;
  std::optional<AdaSls> adasls_;
  std::optional<AdaGradNorm> adagrad_;
  std::optional<AdaSpsDl> adasps_dl_;

  std::optional<VrRunState> vr_;
  ProbabilitySchedule schedule_;
  double mu_ = 10.0;
  ProxyBound proxy_bound_ = ProxyBound::shifted_lower_bound;
  std::uint64_t svrg_epoch_ = 0;
};

}  // namespace

Trace run_experiment(const ExperimentConfig &config, const RunOptions &options) {
  if (config.batch_size == 0) throw ConfigError("batch_size must be positive");
  Runner runner(config, options);
  return runner.run();
}

}  // namespace adastep
