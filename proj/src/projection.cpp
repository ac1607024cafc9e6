#include "adastep/projection.hpp"

#include <cmath>
#include <limits>

namespace adastep {

ProjectionDomain ProjectionDomain::ball(Vec center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw ConfigError("projection ball radius must be positive and finite");
  return {Kind::euclidean_ball, std::move(center), radius};
}

double ProjectionDomain::diameter() const {
  return kind == Kind::euclidean_ball ? 2.0 * radius : std::numeric_limits<double>::infinity();
}

Vec project(const ProjectionDomain &domain, const Vec &x) {
  if (domain.kind == ProjectionDomain::Kind::unconstrained) return x;
  if (domain.center.size() != x.size())
    throw std::invalid_argument("project: ball center dimension mismatch");
  const Vec offset = x - domain.center;
  const double norm = offset.norm();
  if (norm <= domain.radius) return x;
  return domain.center + offset * (domain.radius / norm);
}

}  // namespace adastep
