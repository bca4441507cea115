#pragma once

#include "oschom/constraint.hpp"
#include "oschom/periodic_graph.hpp"
#include "oschom/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace oschom {

struct ComponentReport;

struct Ball {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

struct LiftedVertex {
  int vertex = 0;
  Shift cell = Shift::Zero();
};

struct SearchOptions {
  // Graph-distance / Euclidean-distance bound used to size the search box.
  double length_constant = 2.0;
  // Extra cells around the tight bounding box; negative selects the default.
  int margin_cells = -1;
  bool allow_doubling = true;
};

struct PathResult {
  double length = kInf;
  std::vector<LiftedVertex> vertices;
  std::vector<Vec3> polyline;  // world-space geometry of the path
};

// Shortest-path engine on the lifted graph (vertex, cell) restricted to a box
// of cells. Lifted edge lengths are at least the chord length, so the search
// uses the Euclidean distance to the target set as an A* heuristic.
class LiftedGraphSearch {
 public:
  explicit LiftedGraphSearch(const PeriodicGraph& g);

  const PeriodicGraph& graph() const { return g_; }
  const Adjacency& adjacency() const { return adj_; }

  // Lifted vertices inside a closed ball (inclusive up to 1e-9).
  std::vector<LiftedVertex> vertices_in_ball(const Ball& b) const;

  // Minimal lifted length from any source to each target ball.
  std::vector<double> distances(const std::vector<LiftedVertex>& sources, const std::vector<Ball>& targets,
                                const SearchOptions& opts = {}) const;

  PathResult path(const std::vector<LiftedVertex>& sources, const Ball& target, const SearchOptions& opts = {}) const;

  Vec3 position(const LiftedVertex& v) const { return g_.vertices[v.vertex] + v.cell.cast<double>(); }

 private:
  struct Box {
    Shift lo = Shift::Zero();
    Shift hi = Shift::Zero();
    long long cells() const;
  };

  Box make_box(const std::vector<LiftedVertex>& sources, const std::vector<Ball>& targets, int margin) const;
  std::vector<double> run(const std::vector<LiftedVertex>& sources, const std::vector<Ball>& targets, const Box& box,
                          PathResult* path) const;
  int default_margin(const std::vector<LiftedVertex>& sources, const std::vector<Ball>& targets,
                     const SearchOptions& opts) const;

  const PeriodicGraph& g_;
  Adjacency adj_;
};

double min_path_length(const PeriodicGraph& g, const Ball& source, const Ball& target,
                       const SearchOptions& opts = {});

// Lengths L(T) between admissible points in B(0, sqrt m) and B(T w, sqrt m)
// for every T, computed with one search.
std::vector<double> ray_lengths(const LiftedGraphSearch& search, const Vec3& w, const std::vector<double>& Ts,
                                const SearchOptions& opts = {});

// An empty admissible ball yields +inf; the reason goes to `diagnostic`.
double psi_T_z(const PeriodicGraph& g, const Vec3& w, double T, const SearchOptions& opts = {},
               std::string* diagnostic = nullptr);

// (10, 20, 40, 80) in 2D, (5, 10, 20, 40) in 3D.
std::vector<double> default_schedule(int dim);

struct StableNormOptions {
  std::vector<double> schedule;  // empty selects default_schedule(dim)
  // Extra evenly spaced T values between the first and last schedule entry
  // that enter the slope fit (they cost nothing extra: one search serves all).
  int regression_samples = 16;
  // Length constant C of the level; enters the error bound and the box size.
  double length_constant = 2.0;
};

struct StableNormEstimate {
  double norm = 0.0;           // extrapolated slope of L(T)
  double psi = 0.0;            // norm^2
  double psi_at_max_T = 0.0;   // (L(T_max) / T_max)^2
  double error_bound = 0.0;    // C1 / T_max with C1 = (4 sqrt m + |w|)^2 C^2
  std::vector<double> schedule;
  std::vector<double> psi_T;   // psi_T at each schedule entry
  bool envelope_ok = true;     // psi <= psi_T + C1 / T for every schedule entry
};

StableNormEstimate stable_norm(const PeriodicGraph& g, const Vec3& w, const StableNormOptions& opts = {});
StableNormEstimate stable_norm(const LiftedGraphSearch& search, const Vec3& w, const StableNormOptions& opts = {});

// psi_hom^z(w): 0 at w = 0, +inf when w is outside the span of every
// component's translation lattice, otherwise |w|^2 N(w/|w|)^2 with the
// direction sign-normalised so that the result is exactly even.
double psi_hom_z(const PeriodicGraph& g, const Vec3& w, const StableNormOptions& opts = {},
                 const ComponentReport* report = nullptr);
double psi_hom_z(const LiftedGraphSearch& search, const ComponentReport& report, const Vec3& w,
                 const StableNormOptions& opts = {}, StableNormEstimate* detail = nullptr);

// Graph of the tube {|phi - z| <= c} on an 8-neighbour node grid.
PeriodicGraph tube_graph(const PeriodicConstraint& phi, double z, double c, int resolution);
double psi_T_zc(const PeriodicConstraint& phi, double z, double c, const Vec3& w, double T, int resolution = 64);

// True when no component of rank < m can meet both balls: each such component
// is confined to a slab around the span of its translation lattice.
bool certify_unreachable(const PeriodicGraph& g, const ComponentReport& report, const Ball& a, const Ball& b);

Vec3 sign_normalized(const Vec3& w);

}  // namespace oschom
