#pragma once

#include <Eigen/Core>

#include <limits>

namespace oschom {

// Points are stored with three components; 2D problems keep z = 0.
using Vec3 = Eigen::Vector3d;
using Shift = Eigen::Vector3i;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
};

inline Vec3 vec2(double x, double y) { return Vec3(x, y, 0.0); }

}  // namespace oschom
