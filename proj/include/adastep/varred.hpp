#pragma once

#include "adastep/linesearch.hpp"
#include "adastep/problem.hpp"
#include "adastep/projection.hpp"
#include "adastep/steppers.hpp"

#include <cstdint>
#include <optional>

namespace adastep {

/// Variance-reduction anchor w together with grad f(w) and its components.
struct Snapshot {
  Vec w;
  ComponentGradients grads;  // grads.mean == grad f(w)

  static Snapshot take(Oracle &oracle, const Vec &w);
  const Vec &full_grad() const { return grads.mean; }
};

/// F(x) = f_B(x) + x^T g + (mu/2)||x - anchor||^2 with g = grad f(w) - grad f_B(w).
///
/// Value and gradient go through the run's oracle and are counted there.
class ProxyFunction {
 public:
  ProxyFunction(Oracle &oracle, Batch batch, Vec correction, Vec anchor, double mu);

  /// Builds the proxy for `batch` anchored at x using the snapshot's stored
  /// component gradients (no oracle cost for the correction).
  static ProxyFunction from_snapshot(Oracle &oracle, Batch batch, const Snapshot &snapshot,
                                     const Vec &anchor, double mu);

  double value(const Vec &x);
  Vec gradient(const Vec &x);

  /// Evaluated from already-known batch readings at x (no oracle calls).
  double value_from(double f_batch, const Vec &x) const;
  Vec gradient_from(const Vec &grad_batch, const Vec &x) const;

  /// base_lb + min_x { x^T g + (mu/2)||x - anchor||^2 }
  ///   = base_lb + anchor^T g - ||g||^2 / (2 mu).
  /// Throws NumericError when mu = 0 and g != 0 (unbounded below).
  double lower_bound(double base_lb) const;

  /// F(anchor) - lower_bound(base_lb), computed without cancellation.
  double gap_at_anchor(double f_batch_at_anchor, double base_lb) const;

  const Batch &batch() const { return batch_; }
  const Vec &correction() const { return correction_; }
  const Vec &anchor() const { return anchor_; }
  double mu() const { return mu_; }

 private:
  Oracle *oracle_;
  Batch batch_;
  Vec correction_;
  Vec anchor_;
  double mu_;
};

/// Snapshot refresh probability p_t = 1 / (a t + 1), or a fixed constant.
struct ProbabilitySchedule {
  double a = 0.1;
  std::optional<double> fixed_p;

  void validate() const;
  double p(std::uint64_t t) const;
};

/// With probability p_{t+1} replaces the snapshot by (x_t, grad f(x_t)).
/// Returns true when a refresh happened.
bool snapshot_update(Snapshot &snapshot, const Vec &x_t, std::uint64_t t,
                     const ProbabilitySchedule &schedule, Rng &coin, Oracle &oracle);

/// How F*_B is supplied to the Polyak-type VR stepsize.
enum class ProxyBound { shifted_lower_bound, exact };

/// Mutable state of one variance-reduced run.
struct VrRunState {
  Oracle *oracle = nullptr;
  Sampler *sampler = nullptr;
  Rng *coin = nullptr;
  ProbabilitySchedule schedule;
  ProjectionDomain domain;
  double mu = 10.0;
  ProxyBound bound = ProxyBound::shifted_lower_bound;
  Vec x;
  Snapshot snapshot;
  std::uint64_t t = 0;
  std::uint64_t refreshes = 0;

  /// Sets x_0 and takes the initial snapshot w_0 = x_0 (one full gradient).
  static VrRunState start(Oracle &oracle, Sampler &sampler, Rng &coin, const Vec &x0);
};

struct VrStep {
  Batch batch;
  double eta = 0.0;
  double proxy_value = 0.0;  // F(x_t)
  double proxy_gap = 0.0;    // F(x_t) - F*_B (or its lower bound)
  double grad_sq = 0.0;      // ||grad F(x_t)||^2
  LineSearchResult search;
  bool refreshed = false;
};

/// One AdaSVRPS iteration: AdaSPS on the proxy, projected step, snapshot coin.
VrStep adasvrps_iteration(VrRunState &run, AdaSps &stepper);

/// One AdaSVRLS iteration: Armijo on the proxy feeds AdaSLS.
VrStep adasvrls_iteration(VrRunState &run, AdaSls &stepper, const LineSearchParams &params);

/// One SVRG iteration with constant eta; the snapshot is retaken at x_t
/// whenever t is a positive multiple of epoch_length.
VrStep svrg_iteration(VrRunState &run, double eta, std::uint64_t epoch_length);

}  // namespace adastep
