#pragma once

#include "oschom/constraint.hpp"
#include "oschom/periodic_graph.hpp"
#include "oschom/types.hpp"

#include <cstdint>
#include <vector>

namespace oschom {

struct FinslerBallSpec;

struct LevelGraphOptions {
  // Edges of the contracted graph are cut into pieces no longer than this so
  // that admissible endpoints stay dense along long curves.
  double max_edge_length = 1.0 / 16.0;
  // Node values within this fraction of the image width count as on-level.
  double node_tolerance = 1e-12;
};

// Periodic marching squares on the node grid {i / resolution}^2.
PeriodicGraph extract_level_graph(const PeriodicConstraint& phi, double z, int resolution,
                                  const LevelGraphOptions& opts = {});

enum class NetworkKind { GridLattice2D, FaceNetwork3D, SphereNetwork3D, SynthNetwork };

enum class WiggleShape { Triangle, Arc };

struct NetworkParams {
  double pitch = 1.0 / 4.0;       // FaceNetwork3D crossing-point spacing
  // SphereNetwork3D: 0 keeps only the six touch points of each sphere joined
  // by great-circle arcs; an even n >= 2 adds an n x n cube-sphere mesh.
  int sphere_subdivisions = 0;
  const FinslerBallSpec* spec = nullptr;
  WiggleShape wiggle = WiggleShape::Triangle;
};

PeriodicGraph exact_network_graph(NetworkKind kind, const NetworkParams& params = {});

struct Component {
  std::vector<int> vertices;
  std::vector<Shift> lift;  // cell offset of each vertex in a connected lift
  int translation_rank = 0;
  std::vector<Shift> generators;
  bool unbounded() const { return translation_rank > 0; }
};

struct ComponentReport {
  std::vector<Component> components;
  std::vector<int> component_of;  // vertex -> component index
  int num_unbounded = 0;
  bool satisfies_non_degenerate = false;  // exactly one unbounded component
  double length_constant_estimate = kInf;
};

ComponentReport classify_components(const PeriodicGraph& g);

// Monte-Carlo lower estimate of the controlled-length constant: max ratio of
// graph distance to Euclidean distance over random lifted pairs at distance >= 1.
double estimate_length_constant(const PeriodicGraph& g, int num_pairs, std::uint64_t seed = 1);

}  // namespace oschom
