#pragma once

#include "adastep/types.hpp"

namespace adastep {

/// Feasible set for projected updates: all of R^d or a closed Euclidean ball.
struct ProjectionDomain {
  enum class Kind { unconstrained, euclidean_ball };

  Kind kind = Kind::unconstrained;
  Vec center;
  double radius = 0.0;

  static ProjectionDomain unconstrained() { return {}; }
  /// Throws ConfigError unless radius > 0.
  static ProjectionDomain ball(Vec center, double radius);

  /// Diameter of the set; +inf when unconstrained.
  double diameter() const;
};

/// Euclidean projection onto the domain.
Vec project(const ProjectionDomain &domain, const Vec &x);

}  // namespace adastep
