#include "adastep/diagnostics.hpp"

#include "adastep/optimal_gap.hpp"

#include <cmath>

namespace adastep {

using nlohmann::json;

namespace {

double constant(const json &c, const char *key) {
  if (!c.contains(key) || !c.at(key).is_number())
    throw ConfigError(std::string("trace header lacks resolved constant '") + key + "'");
  return c.at(key).get<double>();
}

/// Largest finite-difference curvature of sampled components around x.
double estimate_smoothness(const FiniteSumProblem &problem, const Vec &x, std::uint64_t seed) {
  Rng rng(seed);
  double best = 0.0;
  const Index probes = std::min<Index>(problem.size(), 64);
  for (Index k = 0; k < probes; ++k) {
    const Index i = rng.uniform_index(problem.size());
    Vec delta(static_cast<Eigen::Index>(problem.dim()));
    for (Eigen::Index j = 0; j < delta.size(); ++j) delta[j] = rng.normal();
    delta *= 1e-3 / delta.norm();
    Vec g0 = Vec::Zero(delta.size());
    Vec g1 = Vec::Zero(delta.size());
    problem.add_component_gradient(i, x, 1.0, g0);
    problem.add_component_gradient(i, x + delta, 1.0, g1);
    best = std::max(best, (g1 - g0).norm() / delta.norm());
  }
  return best;
}

}  // namespace

DiagnosticsReport compute_diagnostics(const FiniteSumProblem &problem, Index batch_size, const Trace &trace,
                                      std::uint64_t sample_count, std::uint64_t seed) {
  DiagnosticsReport r;
  const ReferenceOptimum ref = problem.reference_optimum();
  const Index n = problem.size();
  r.sampled = binomial(n, batch_size) > kExactEnumerationLimit;
  r.sigma_fB = std::max(0.0, sigma_f_B(problem, ref.f_star, batch_size, sample_count, seed));
  r.err_fB = std::max(0.0, err_f_B(problem, batch_size, sample_count, seed));

  if (auto L = problem.smoothness()) {
    r.smoothness = *L;
  } else {
    r.smoothness = estimate_smoothness(problem, ref.x_star, seed);
    r.smoothness_estimate = true;
  }
  const double L = r.smoothness;

  const json &h = trace.header;
  const json &params = h.at("config").at("algorithm");
  const std::string algorithm = params.at("name").get<std::string>();
  const json &c = h.at("constants");
  r.iterations = h.value("iterations", std::uint64_t{0});

  for (const TraceRecord &rec : trace.records) r.max_dist_sq = std::max(r.max_dist_sq, rec.dist_sq);

  // Iterate radius bound, for the non-VR adaptive methods on strongly convex problems.
  const auto mu = problem.strong_convexity();
  const bool polyak = algorithm == "adasps";
  const bool linesearch = algorithm == "adasls";
  if (mu && (polyak || linesearch)) {
    double b = 0.0;
    if (polyak) {
      r.sigma_max = batch_maximum(n, batch_size, sample_count, seed, [&](const Batch &batch) {
        return problem.batch_value(batch, ref.x_star) - problem.batch_lower_bound(batch);
      });
      const double cp = constant(c, "c_p");
      b = 1.0 / (4.0 * cp * cp * cp * std::sqrt(constant(c, "first_gap")));
    } else {
      r.sigma_max = batch_maximum(n, batch_size, sample_count, seed, [&](const Batch &batch) {
        const auto m = problem.batch_min(batch);
        if (!m) throw ConfigError("problem does not expose batch minima");
        return problem.batch_value(batch, ref.x_star) - *m;
      });
      const double cl = constant(c, "c_l");
      const double rho = constant(c, "rho");
      b = 1.0 / (4.0 * cl * cl * cl * rho * rho *
                 std::sqrt(constant(c, "first_gamma") * constant(c, "first_grad_sq")));
    }
    const double eta0 = constant(c, "eta0");
    const double spread = 2.0 * std::max(0.0, r.sigma_max) + b;
    const Vec x0 = Vec::Zero(static_cast<Eigen::Index>(problem.dim()));
    r.dmax_bound = std::max({(x0 - ref.x_star).squaredNorm(), spread / *mu, spread * eta0});
    r.has_dmax = std::isfinite(r.dmax_bound);
    if (r.has_dmax) {
      r.containment_checked = true;
      r.containment_holds = r.max_dist_sq <= r.dmax_bound * (1.0 + 1e-9);
    }
  }

  const json &proj = h.at("projection");
  if (proj.at("kind").get<std::string>() == "ball") {
    const double radius = proj.at("radius").get<double>();
    r.diameter_sq = 4.0 * radius * radius;
    r.diameter_source = "ball";
  } else if (r.has_dmax) {
    r.diameter_sq = r.dmax_bound;
    r.diameter_source = "dmax";
  } else {
    r.diameter_sq = 4.0 * r.max_dist_sq;
    r.diameter_source = "empirical";
  }
  const double D2 = r.diameter_sq;
  const double T = static_cast<double>(std::max<std::uint64_t>(r.iterations, 1));

  if (algorithm == "adasps" && c.contains("c_p")) {
    const double cp = constant(c, "c_p");
    r.tau_kind = "tau_p";
    r.tau = 2.0 * cp * L * D2 + 1.0 / cp;
    r.averaged_bound = r.tau * r.tau / T + r.tau * std::sqrt(r.sigma_fB + r.err_fB) / std::sqrt(T);
  } else if (algorithm == "adasls" && c.contains("c_l")) {
    const double cl = constant(c, "c_l");
    const double rho = constant(c, "rho");
    const double gmax = params.at("gamma_max").get<double>();
    r.tau_kind = "tau_l";
    r.tau = std::max(L / ((1.0 - rho) * std::sqrt(rho)), 1.0 / (gmax * std::sqrt(rho))) * cl * D2 +
            1.0 / (cl * std::sqrt(rho));
    r.averaged_bound = r.tau * r.tau / T + r.tau * std::sqrt(r.sigma_fB) / std::sqrt(T);
  } else if ((algorithm == "adasvrps" || algorithm == "adasvrls") && params.at("p").is_null()) {
    const double mu_F = params.at("mu_F").get<double>();
    const double a = params.at("a").get<double>();
    if (algorithm == "adasvrps") {
      const double cp = constant(c, "c_p");
      r.tau_kind = "tau_vr_p";
      r.tau = 2.0 * cp * (L + mu_F) * D2 + 1.0 / cp;
    } else {
      const double cl = constant(c, "c_l");
      const double rho = constant(c, "rho");
      const double gmax = params.at("gamma_max").get<double>();
      r.tau_kind = "tau_vr_l";
      r.tau = std::max((L + mu_F) / ((1.0 - rho) * std::sqrt(rho)), 1.0 / (gmax * std::sqrt(rho))) * cl * D2 +
              1.0 / (cl * std::sqrt(rho));
    }
    if (mu_F > 0.0) r.averaged_bound = (1.0 + 2.0 * L / ((1.0 - a) * mu_F)) * r.tau * r.tau / T;
  }
  return r;
}

json DiagnosticsReport::to_json() const {
  json j;
  j["sigma_fB"] = sigma_fB;
  j["err_fB"] = err_fB;
  j["sampled"] = sampled;
  j["smoothness"] = smoothness;
  j["smoothness_status"] = smoothness_estimate ? "estimate" : "exact";
  j["tau_kind"] = tau_kind;
  j["tau"] = tau;
  j["diameter_sq"] = diameter_sq;
  j["diameter_source"] = diameter_source;
  j["iterations"] = iterations;
  j["averaged_bound"] = averaged_bound;
  j["max_dist_sq"] = max_dist_sq;
  if (has_dmax) {
    j["dmax_bound"] = dmax_bound;
    j["sigma_max"] = sigma_max;
    j["containment_holds"] = containment_holds;
  } else {
    j["dmax_bound"] = nullptr;
  }
  return j;
}

}  // namespace adastep
