#pragma once

#include "oschom/constraint.hpp"
#include "oschom/geodesic.hpp"
#include "oschom/hull.hpp"
#include "oschom/levelset.hpp"
#include "oschom/periodic_graph.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oschom {

struct DirectionalMetricSample {
  Vec3 direction = Vec3::Zero();
  double level = 0.0;
  std::vector<std::pair<double, double>> psi_T_values;
  double psi_hom_value = kInf;
  double error_bound = 0.0;
};

enum class LevelStatus {
  UniqueUnbounded,   // exactly one unbounded component
  DegenerateFamily,  // several unbounded components sharing one rank-1 direction
  Conjectural,       // several unbounded components otherwise
};

std::string_view to_string(LevelStatus s);

struct LevelSamples {
  double level = 0.0;
  LevelStatus status = LevelStatus::UniqueUnbounded;
  int num_unbounded = 0;
  std::vector<DirectionalMetricSample> samples;
};

struct MetricOptions {
  int directions = 0;  // 0 selects 64 in 2D and 200 in 3D
  int resolution = 128;
  int scan_levels = 32;
  int threads = 1;
  StableNormOptions stable;
  LevelGraphOptions level_graph;
};

struct HomogenizedMetric {
  int dim = 2;
  std::vector<double> levels_used;
  std::vector<LevelSamples> directional_samples;
  std::vector<Vec3> directions;
  std::vector<double> psi_values;  // pointwise minimum over levels
  std::vector<int> psi_level;      // index into directional_samples attaining the minimum
  int resolution = 0;              // contour resolution used for 2D levels
  Polytope ball;
  std::vector<Vec3> ball_vertices;
  std::optional<Vec3> degenerate_subspace;
  std::vector<std::string> labels;

  double query(const Vec3& w) const;
  // Pointwise minimum over levels at the sampled direction closest to w/|w|.
  double raw_min(const Vec3& w) const;
};

// Uniform angular grid in 2D; antipodally closed Fibonacci set in 3D.
std::vector<Vec3> direction_grid(int dim, int count);

// Evenly spaced levels plus the discrete saddle values of phi.
std::vector<double> scan_level_candidates(const PeriodicConstraint& phi, int resolution, int scan_levels = 32);

// Level graphs for 3D constraints, which come from exact constructors.
std::vector<PeriodicGraph> exact_level_graphs(const PeriodicConstraint& phi);

HomogenizedMetric assemble_metric(const PeriodicConstraint& phi, const std::vector<double>& level_candidates,
                                  const MetricOptions& opts = {});
HomogenizedMetric assemble_metric_from_graphs(const std::vector<PeriodicGraph>& levels, const MetricOptions& opts = {});
HomogenizedMetric metric_from_samples(int dim, std::vector<LevelSamples> levels);

double query_metric(const HomogenizedMetric& metric, const Vec3& w);

struct BallRecord {
  int dim = 2;
  std::vector<Vec3> vertices;  // 2D: counter-clockwise
  std::vector<std::array<int, 3>> triangles;
  std::optional<Vec3> degenerate_subspace;
};

BallRecord export_ball(const HomogenizedMetric& metric);

}  // namespace oschom
