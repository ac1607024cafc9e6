#include "adastep/varred.hpp"

#include "adastep/quadratic.hpp"

#include <cmath>

namespace adastep {

Snapshot Snapshot::take(Oracle &oracle, const Vec &w) {
  return Snapshot{w, oracle.full_gradient_components(w)};
}

ProxyFunction::ProxyFunction(Oracle &oracle, Batch batch, Vec correction, Vec anchor, double mu)
    : oracle_(&oracle),
      batch_(std::move(batch)),
      correction_(std::move(correction)),
      anchor_(std::move(anchor)),
      mu_(mu) {
  if (!(mu >= 0.0)) throw ConfigError("proxy: mu_F must be non-negative");
  if (correction_.size() != anchor_.size())
    throw std::invalid_argument("proxy: correction and anchor dimensions differ");
}

ProxyFunction ProxyFunction::from_snapshot(Oracle &oracle, Batch batch, const Snapshot &snapshot,
                                           const Vec &anchor, double mu) {
  Vec correction = snapshot.full_grad() - snapshot.grads.batch_mean(batch);
  return ProxyFunction(oracle, std::move(batch), std::move(correction), anchor, mu);
}

double ProxyFunction::value_from(double f_batch, const Vec &x) const {
  return f_batch + x.dot(correction_) + 0.5 * mu_ * (x - anchor_).squaredNorm();
}

Vec ProxyFunction::gradient_from(const Vec &grad_batch, const Vec &x) const {
  return grad_batch + correction_ + mu_ * (x - anchor_);
}

double ProxyFunction::value(const Vec &x) { return value_from(oracle_->value(batch_, x), x); }

Vec ProxyFunction::gradient(const Vec &x) { return gradient_from(oracle_->gradient(batch_, x), x); }

double ProxyFunction::lower_bound(double base_lb) const {
  const double g_sq = correction_.squaredNorm();
  if (g_sq == 0.0) return base_lb;
  if (mu_ == 0.0) throw NumericError("proxy lower bound: mu_F = 0 with nonzero correction");
  return base_lb + anchor_.dot(correction_) - g_sq / (2.0 * mu_);
}

double ProxyFunction::gap_at_anchor(double f_batch_at_anchor, double base_lb) const {
  const double g_sq = correction_.squaredNorm();
  if (g_sq == 0.0) return f_batch_at_anchor - base_lb;
  if (mu_ == 0.0) throw NumericError("proxy lower bound: mu_F = 0 with nonzero correction");
  return (f_batch_at_anchor - base_lb) + g_sq / (2.0 * mu_);
}

void ProbabilitySchedule::validate() const {
  if (fixed_p) {
    if (!(*fixed_p >= 0.0 && *fixed_p <= 1.0)) throw ConfigError("fixed refresh probability must be in [0, 1]");
    return;
  }
  if (!(a >= 0.0 && a < 1.0)) throw ConfigError("refresh schedule: a must lie in [0, 1)");
}

double ProbabilitySchedule::p(std::uint64_t t) const {
  if (fixed_p) return *fixed_p;
  return 1.0 / (a * static_cast<double>(t) + 1.0);
}

bool snapshot_update(Snapshot &snapshot, const Vec &x_t, std::uint64_t t,
                     const ProbabilitySchedule &schedule, Rng &coin, Oracle &oracle) {
  if (!coin.bernoulli(schedule.p(t + 1))) return false;
  snapshot = Snapshot::take(oracle, x_t);
  return true;
}

VrRunState VrRunState::start(Oracle &oracle, Sampler &sampler, Rng &coin, const Vec &x0) {
  VrRunState run;
  run.oracle = &oracle;
  run.sampler = &sampler;
  run.coin = &coin;
  run.x = x0;
  run.snapshot = Snapshot::take(oracle, x0);
  return run;
}

namespace {

struct ProxyReadings {
  ProxyFunction proxy;
  double f_batch;
  Vec grad;
  double value;
  double gap;
};

ProxyReadings read_proxy(VrRunState &run, Batch batch) {
  Oracle &oracle = *run.oracle;
  ProxyFunction proxy = ProxyFunction::from_snapshot(oracle, std::move(batch), run.snapshot, run.x, run.mu);
  const double f_batch = oracle.value(proxy.batch(), run.x);
  Vec grad = proxy.gradient_from(oracle.gradient(proxy.batch(), run.x), run.x);
  const double value = proxy.value_from(f_batch, run.x);
  double gap;
  if (run.bound == ProxyBound::exact) {
    const auto *quad = dynamic_cast<const DiagonalQuadraticProblem *>(&oracle.problem());
    if (!quad) throw ConfigError("exact proxy minimum is only available for quadratic problems");
    gap = std::max(0.0, value - quad->proxy_min(proxy.batch(), proxy.correction(), run.x, run.mu));
  } else {
    gap = proxy.gap_at_anchor(f_batch, oracle.problem().batch_lower_bound(proxy.batch()));
  }
  return {std::move(proxy), f_batch, std::move(grad), value, gap};
}

void finish(VrRunState &run, VrStep &step, const Vec &direction) {
  const Vec x_t = run.x;
  if (step.grad_sq > 0.0) run.x = project(run.domain, run.x - step.eta * direction);
  if (!run.x.allFinite()) throw NumericError("variance-reduced iterate became non-finite");
  step.refreshed = snapshot_update(run.snapshot, x_t, run.t, run.schedule, *run.coin, *run.oracle);
  if (step.refreshed) ++run.refreshes;
  ++run.t;
}

}  // namespace

VrStep adasvrps_iteration(VrRunState &run, AdaSps &stepper) {
  VrStep step;
  auto r = read_proxy(run, run.sampler->sample());
  step.batch = r.proxy.batch();
  step.proxy_value = r.value;
  step.proxy_gap = r.gap;
  step.grad_sq = r.grad.squaredNorm();
  step.eta = stepper.step(r.gap, 0.0, step.grad_sq);
  finish(run, step, r.grad);
  return step;
}

VrStep adasvrls_iteration(VrRunState &run, AdaSls &stepper, const LineSearchParams &params) {
  VrStep step;
  auto r = read_proxy(run, run.sampler->sample());
  step.batch = r.proxy.batch();
  step.proxy_value = r.value;
  step.proxy_gap = r.gap;
  step.grad_sq = r.grad.squaredNorm();
  if (step.grad_sq > 0.0) {
    ProxyFunction &proxy = r.proxy;
    step.search = backtracking_armijo([&proxy](const Vec &y) { return proxy.value(y); }, r.value,
                                      step.grad_sq, run.x, r.grad, params);
  }
  step.eta = stepper.step(step.search.gamma, step.grad_sq);
  finish(run, step, r.grad);
  return step;
}

VrStep svrg_iteration(VrRunState &run, double eta, std::uint64_t epoch_length) {
  if (epoch_length == 0) throw ConfigError("SVRG epoch length must be positive");
  Oracle &oracle = *run.oracle;
  if (run.t > 0 && run.t % epoch_length == 0) {
    run.snapshot = Snapshot::take(oracle, run.x);
    ++run.refreshes;
  }
  VrStep step;
  step.batch = run.sampler->sample();
  const Vec g = oracle.gradient(step.batch, run.x) + run.snapshot.full_grad() -
                run.snapshot.grads.batch_mean(step.batch);
  step.grad_sq = g.squaredNorm();
  step.eta = eta;
  run.x = project(run.domain, run.x - eta * g);
  if (!run.x.allFinite()) throw NumericError("SVRG iterate became non-finite");
  ++run.t;
  return step;
}

}  // namespace adastep
