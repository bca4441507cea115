#pragma once

#include "oschom/types.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace oschom {

struct HullFacet {
  Vec3 normal = Vec3::Zero();  // unit outward normal inside the span
  double offset = 0.0;         // normal . x <= offset on the polytope
};

// Convex hull of a point set containing the origin, described inside the
// linear span of the points (rank 0..3).
struct Polytope {
  int rank = 0;
  Eigen::Matrix<double, 3, Eigen::Dynamic> basis;  // orthonormal span basis
  std::vector<Vec3> vertices;                      // 2D: counter-clockwise in the span plane
  std::vector<HullFacet> facets;
  std::vector<std::array<int, 3>> triangles;       // rank 3 only, indices into vertices

  bool in_span(const Vec3& w, double tol = 1e-9) const;
  // Minkowski gauge; +inf outside the span.
  double gauge(const Vec3& w) const;
};

Polytope convex_hull(const std::vector<Vec3>& points, double tol = 1e-12);

// Monotone-chain hull of planar points (z ignored), counter-clockwise.
std::vector<Vec3> planar_hull(std::vector<Vec3> points, double tol = 1e-14);

}  // namespace oschom
