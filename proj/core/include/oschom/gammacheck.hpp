#pragma once

#include "oschom/constraint.hpp"
#include "oschom/metric.hpp"
#include "oschom/periodic_graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace oschom {

// Nodes u_0..u_K at times i / K on [0, 1].
struct DiscreteCurve {
  std::vector<Vec3> nodes;
  int dim = 2;

  int K() const { return static_cast<int>(nodes.size()) - 1; }
  static DiscreteCurve straight(const Vec3& a, const Vec3& b, int K, int dim);
  // Piecewise-linear resampling at K + 1 uniform times.
  DiscreteCurve resampled(int K) const;
};

struct EnergyTerms {
  double dirichlet = 0.0;
  double penalty = 0.0;
  double total() const { return dirichlet + penalty; }
};

EnergyTerms energy_terms(const PeriodicConstraint& phi, double eps, double delta, const DiscreteCurve& curve);
double energy_F_eps(const PeriodicConstraint& phi, double eps, double delta, const DiscreteCurve& curve);

// Gradient of the discrete energy with respect to every node.
std::vector<Vec3> energy_gradient(const PeriodicConstraint& phi, double eps, double delta,
                                  const DiscreteCurve& curve);

struct DescentOptions {
  int max_iterations = 100000;
  double grad_tol_factor = 1e-6;  // stop when |grad| <= factor * K
  std::uint64_t seed = 1;
  std::vector<DiscreteCurve> warm_starts;  // extra initial curves, resampled to K
  int threads = 1;
};

struct DescentResult {
  DiscreteCurve curve;
  double energy = kInf;
  double initial_energy = kInf;  // of the winning start
  int iterations = 0;
  bool converged = false;        // false means the iteration cap was hit
  std::vector<double> start_energies;
  std::vector<double> final_energies;
};

DescentResult minimize_F_eps(const PeriodicConstraint& phi, double eps, double delta, const Vec3& w, int K,
                             int restarts, const DescentOptions& opts = {});

struct CaratheodoryPiece {
  double weight = 0.0;  // lambda_i
  Vec3 target = Vec3::Zero();  // w_i
  int level = 0;        // index into metric.directional_samples
};

// w = sum lambda_i w_i over ball vertices with psi_hom(w) = sum lambda_i psi(w_i).
std::vector<CaratheodoryPiece> caratheodory_decomposition(const HomogenizedMetric& metric, const Vec3& w);

struct RecoveryOptions {
  double nodes_per_unit_length = 20.0;  // micro-scale resolution (>= 10 per period)
  int min_nodes = 200;
  int max_nodes = 50000;
};

// Level graphs in the order of metric.directional_samples.
std::vector<PeriodicGraph> metric_level_graphs(const PeriodicConstraint& phi, const HomogenizedMetric& metric);

DiscreteCurve build_recovery_sequence(const PeriodicConstraint& phi, const HomogenizedMetric& metric, const Vec3& w,
                                      double eps, double delta, const RecoveryOptions& opts = {});
DiscreteCurve build_recovery_sequence(const std::vector<PeriodicGraph>& level_graphs, const HomogenizedMetric& metric,
                                      const Vec3& w, double eps, double delta, const RecoveryOptions& opts = {});

// max_i |u_i - t_i w|
double max_deviation_from_affine(const DiscreteCurve& curve, const Vec3& w);

struct TrendOptions {
  int restarts = 2;
  int max_iterations = 2000;
  int descent_nodes = 0;  // 0: same node count as the recovery curve
  std::uint64_t seed = 1;
  bool warm_start = true;
  RecoveryOptions recovery;
  int threads = 1;
};

struct TrendRow {
  double eps = 0.0;
  double delta = 0.0;
  double recovery_energy = 0.0;
  double descent_energy = 0.0;
  double psi_hom = 0.0;
  bool descent_converged = false;
  double recovery_deviation = 0.0;
};

struct TrendTable {
  std::vector<TrendRow> rows;
  bool recovery_nonincreasing = true;  // within 2% noise
  bool descent_above_floor = true;     // descent >= |w|^2 - 1e-3
  std::string to_csv() const;
};

TrendTable gamma_trend(const PeriodicConstraint& phi, const HomogenizedMetric& metric, const Vec3& w,
                       const std::vector<double>& eps_list, double alpha, const TrendOptions& opts = {});

}  // namespace oschom
