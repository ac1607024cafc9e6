#include "adastep/steppers.hpp"

#include <cmath>

namespace adastep {

namespace {
void check_gap(double f_batch, double lb) {
  if (f_batch < lb)
    throw LowerBoundError("lower bound " + std::to_string(lb) + " exceeds minibatch value " +
                          std::to_string(f_batch));
}

void check_positive(double v, const char *what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive");
}
}  // namespace

ScaleCalibration ScaleCalibration::fixed(double value) {
  check_positive(value, "stepsize constant");
  ScaleCalibration c;
  c.scale_ = value;
  c.value_ = value;
  c.resolved_ = true;
  return c;
}

ScaleCalibration ScaleCalibration::from_scale(double scale) {
  check_positive(scale, "stepsize scale");
  ScaleCalibration c;
  c.scale_ = scale;
  return c;
}

double ScaleCalibration::finish(double denominator) {
  if (denominator > 0.0 && std::isfinite(denominator)) {
    value_ = scale_ / denominator;
  } else {
    value_ = scale_;
    fell_back_ = true;
  }
  resolved_ = true;
  return value_;
}

double ScaleCalibration::resolve_polyak(double gap) {
  if (resolved_) return value_;
  return finish(std::sqrt(gap));
}

double ScaleCalibration::resolve_linesearch(double rho, double gamma, double grad_sq) {
  if (resolved_) return value_;
  return finish(rho * std::sqrt(gamma * grad_sq));
}

double AdaSps::step(double f_batch, double lb, double grad_sq) {
  check_gap(f_batch, lb);
  const double gap = f_batch - lb;
  accumulator_ += gap;
  const double c = c_p_.resolve_polyak(gap);
  if (grad_sq == 0.0) return eta_prev_;
  const double candidate = gap / (c * grad_sq * (std::sqrt(accumulator_) + kEpsilonGuard));
  eta_prev_ = std::min(candidate, eta_prev_);
  return eta_prev_;
}

StateMap AdaSps::state() const {
  return {{"c_p", c_p_.value()},
          {"c_p_scale", c_p_.scale()},
          {"accumulator", accumulator_},
          {"eta_prev", eta_prev_}};
}

double AdaSls::step(double gamma, double grad_sq) {
  if (grad_sq == 0.0) return eta_prev_;
  accumulator_ += gamma * grad_sq;
  const double c = c_l_.resolve_linesearch(rho_, gamma, grad_sq);
  const double candidate = gamma / (c * (std::sqrt(accumulator_) + kEpsilonGuard));
  eta_prev_ = std::min(candidate, eta_prev_);
  return eta_prev_;
}

StateMap AdaSls::state() const {
  return {{"c_l", c_l_.value()},
          {"c_l_scale", c_l_.scale()},
          {"rho", rho_},
          {"accumulator", accumulator_},
          {"eta_prev", eta_prev_}};
}

DecSps::DecSps(double c0, double gamma_b) : c0_(c0), gamma_b_(gamma_b) {
  check_positive(c0, "DecSPS c0");
  check_positive(gamma_b, "DecSPS gamma_b");
}

double DecSps::step(double f_batch, double lb, double grad_sq) {
  check_gap(f_batch, lb);
  const double c_t = c0_ * std::sqrt(static_cast<double>(t_) + 1.0);
  const double carried =
      t_ == 0 ? c0_ * gamma_b_ : c0_ * std::sqrt(static_cast<double>(t_)) * eta_prev_;
  // A zero gradient leaves only the decayed cap; the caller skips the update.
  const double ratio = grad_sq == 0.0 ? kInfinity : (f_batch - lb) / grad_sq;
  eta_prev_ = std::min(ratio, carried) / c_t;
  ++t_;
  return eta_prev_;
}

StateMap DecSps::state() const {
  return {{"c0", c0_}, {"gamma_b", gamma_b_}, {"t", static_cast<double>(t_)}, {"eta_prev", eta_prev_}};
}

Sps::Sps(double c, std::optional<double> gamma_b) : c_(c), gamma_b_(gamma_b) {
  check_positive(c, "SPS c");
  if (gamma_b) check_positive(*gamma_b, "SPS gamma_b");
}

double Sps::step(double f_batch, double f_star_batch, double grad_sq) {
  check_gap(f_batch, f_star_batch);
  if (grad_sq == 0.0) return 0.0;
  const double eta = (f_batch - f_star_batch) / (c_ * grad_sq);
  return gamma_b_ ? std::min(eta, *gamma_b_) : eta;
}

StateMap Sps::state() const {
  StateMap m{{"c", c_}};
  if (gamma_b_) m["gamma_b"] = *gamma_b_;
  return m;
}

AdaGradNorm::AdaGradNorm(double c_g, double b0) : c_g_(c_g), b0_sq_(b0 * b0) {
  check_positive(c_g, "AdaGrad-Norm c_g");
  if (!(b0 >= 0.0)) throw ConfigError("AdaGrad-Norm b0 must be non-negative");
}

double AdaGradNorm::step(double grad_sq) {
  accumulator_ += grad_sq;
  // Guard only the all-zero case; otherwise the exact formula applies.
  return c_g_ / std::max(std::sqrt(accumulator_ + b0_sq_), kEpsilonGuard);
}

StateMap AdaGradNorm::state() const {
  return {{"c_g", c_g_}, {"b0_sq", b0_sq_}, {"accumulator", accumulator_}};
}

std::string to_string(Schedule s) {
  switch (s) {
    case Schedule::constant: return "constant";
    case Schedule::inv_sqrt: return "inv_sqrt";
    case Schedule::inv_t: return "inv_t";
  }
  return "?";
}

Schedule schedule_from_string(const std::string &s) {
  if (s == "constant") return Schedule::constant;
  if (s == "inv_sqrt") return Schedule::inv_sqrt;
  if (s == "inv_t") return Schedule::inv_t;
  throw ConfigError("unknown SGD schedule '" + s + "'");
}

double sgd_schedule_step(Schedule kind, double eta0, std::uint64_t t) {
  const double tp1 = static_cast<double>(t) + 1.0;
  switch (kind) {
    case Schedule::constant: return eta0;
    case Schedule::inv_sqrt: return eta0 / std::sqrt(tp1);
    case Schedule::inv_t: return eta0 / tp1;
  }
  return eta0;
}

AdaSpsDl::AdaSpsDl(double c_p_scale, std::uint64_t update_every)
    : scale_(c_p_scale), update_every_(update_every) {
  check_positive(c_p_scale, "AdaSPS(DL) c_p_scale");
  if (update_every == 0) throw ConfigError("AdaSPS(DL) update frequency must be >= 1");
}

double AdaSpsDl::step(double f_batch, double lb, double grad_sq) {
  check_gap(f_batch, lb);
  const double gap = f_batch - lb;
  accumulator_ += gap;
  const bool restart = t_ % update_every_ == 0;
  ++t_;
  if (restart) {
    const double root = std::sqrt(accumulator_);
    c_p_ = root > 0.0 ? scale_ / root : scale_;
  }
  if (grad_sq == 0.0) return eta_prev_;
  const double candidate = gap / (c_p_ * grad_sq * (std::sqrt(accumulator_) + kEpsilonGuard));
  eta_prev_ = restart ? candidate : std::min(candidate, eta_prev_);
  return eta_prev_;
}

StateMap AdaSpsDl::state() const {
  return {{"c_p", c_p_},
          {"c_p_scale", scale_},
          {"update_every", static_cast<double>(update_every_)},
          {"accumulator", accumulator_},
          {"eta_prev", eta_prev_},
          {"t", static_cast<double>(t_)}};
}

}  // namespace adastep
