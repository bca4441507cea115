#pragma once

#include "oschom/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace oschom {

// Undirected edge of a Z^m-periodic graph. Traversing tail -> head moves the
// head into the cell offset by `shift`; the reverse traversal negates it.
// The polyline starts at vertices[tail] and ends at vertices[head] + shift.
struct GraphEdge {
  int tail = 0;
  int head = 0;
  Shift shift = Shift::Zero();
  double length = 0.0;
  std::vector<Vec3> polyline;
};

struct PeriodicGraph {
  int dim = 2;
  std::vector<Vec3> vertices;  // canonical positions in [0, 1)^m
  std::vector<GraphEdge> edges;
  std::optional<double> level;
  bool is_surface_mesh = false;
  std::vector<std::string> notes;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
};

struct Arc {
  int to = 0;
  Shift shift = Shift::Zero();
  double length = 0.0;
  int edge = 0;
  bool forward = true;
};

// Compressed adjacency of both traversal directions of every edge.
struct Adjacency {
  std::vector<int> offsets;
  std::vector<Arc> arcs;

  int degree(int v) const { return offsets[v + 1] - offsets[v]; }
  const Arc* begin(int v) const { return arcs.data() + offsets[v]; }
  const Arc* end(int v) const { return arcs.data() + offsets[v + 1]; }
};

Adjacency build_adjacency(const PeriodicGraph& g);

double polyline_length(const std::vector<Vec3>& pts);

// Wraps coordinates into [0, 1) and returns the integer cell that was removed.
Vec3 wrap_unit(const Vec3& x, int dim, Shift* cell = nullptr);

// Incremental construction from world-space geometry: vertices are deduplicated
// modulo Z^m, edge shifts are derived from the world positions of the ends.
class GraphBuilder {
 public:
  explicit GraphBuilder(int dim, double merge_tol = 1e-9);

  int vertex(const Vec3& world, Shift* cell = nullptr);
  // Adds an edge along a world-space polyline; returns the edge index or -1
  // for zero-length loops.
  int add_edge(const std::vector<Vec3>& world_polyline);
  int add_edge(const std::vector<Vec3>& world_polyline, double length);
  int add_segment(const Vec3& a, const Vec3& b) { return add_edge({a, b}); }

  PeriodicGraph& graph() { return graph_; }
  PeriodicGraph take();

 private:
  using Key = std::array<long long, 3>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  Key key(const Vec3& canonical) const;

  PeriodicGraph graph_;
  double tol_;
  std::unordered_map<Key, int, KeyHash> index_;
};

// Merges chains of degree-2 vertices into single polyline edges. Cycles made
// only of degree-2 vertices keep one vertex.
PeriodicGraph contract_chains(const PeriodicGraph& g);

// Splits every edge longer than `max_length` into equal arc-length pieces.
PeriodicGraph split_long_edges(const PeriodicGraph& g, double max_length);

// Removes parallel copies of an edge (same ends, shift and length).
PeriodicGraph dedupe_edges(const PeriodicGraph& g, double length_tol = 1e-12);

// Removes vertices without incident edges.
PeriodicGraph drop_isolated(const PeriodicGraph& g);

}  // namespace oschom
