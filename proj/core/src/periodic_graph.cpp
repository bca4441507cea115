#include "oschom/periodic_graph.hpp"

#include "oschom/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace oschom {

Adjacency build_adjacency(const PeriodicGraph& g) {
  Adjacency adj;
  int n = g.num_vertices();
  adj.offsets.assign(n + 1, 0);
  for (const auto& e : g.edges) {
    ++adj.offsets[e.tail + 1];
    ++adj.offsets[e.head + 1];
  }
  for (int v = 0; v < n; ++v) adj.offsets[v + 1] += adj.offsets[v];
  adj.arcs.resize(adj.offsets[n]);
  std::vector<int> fill(adj.offsets.begin(), adj.offsets.end() - 1);
  for (int i = 0; i < g.num_edges(); ++i) {
    const auto& e = g.edges[i];
    adj.arcs[fill[e.tail]++] = Arc{e.head, e.shift, e.length, i, true};
    adj.arcs[fill[e.head]++] = Arc{e.tail, Shift(-e.shift), e.length, i, false};
  }
  return adj;
}

double polyline_length(const std::vector<Vec3>& pts) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += (pts[i + 1] - pts[i]).norm();
  return s;
}

Vec3 wrap_unit(const Vec3& x, int dim, Shift* cell) {
  Vec3 y = x;
  Shift c = Shift::Zero();
  for (int a = 0; a < dim; ++a) {
    double f = std::floor(x[a]);
    y[a] = x[a] - f;
    if (y[a] >= 1.0 - 1e-12) {
      y[a] = 0.0;
      f += 1.0;
    }
    c[a] = static_cast<int>(f);
  }
  if (cell) *cell = c;
  return y;
}

std::size_t GraphBuilder::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = static_cast<std::size_t>(k[0]) * 73856093u;
  h ^= static_cast<std::size_t>(k[1]) * 19349663u;
  h ^= static_cast<std::size_t>(k[2]) * 83492791u;
  return h;
}

GraphBuilder::GraphBuilder(int dim, double merge_tol) : tol_(merge_tol) {
  if (dim != 2 && dim != 3) fail(ErrorCode::InvalidArgument, "graph dimension must be 2 or 3");
  graph_.dim = dim;
}

GraphBuilder::Key GraphBuilder::key(const Vec3& c) const {
  return {std::llround(c[0] / tol_), std::llround(c[1] / tol_), std::llround(c[2] / tol_)};
}

int GraphBuilder::vertex(const Vec3& world, Shift* cell) {
  int dim = graph_.dim;
  Vec3 c = world;
  Shift off = Shift::Zero();
  for (int a = 0; a < dim; ++a) {
    double f = std::floor(world[a]);
    c[a] = world[a] - f;
    if (c[a] >= 1.0 - tol_) {
      c[a] = 0.0;
      f += 1.0;
    }
    off[a] = static_cast<int>(f);
  }
  if (dim == 2) c[2] = 0.0;
  if (cell) *cell = off;
  Key k = key(c);
  int kz = dim == 3 ? 1 : 0;
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dz = -kz; dz <= kz; ++dz) {
        auto it = index_.find({k[0] + dx, k[1] + dy, k[2] + dz});
        if (it != index_.end() && (graph_.vertices[it->second] - c).norm() <= tol_) return it->second;
      }
    }
  }
  int id = graph_.num_vertices();
  graph_.vertices.push_back(c);
  index_.emplace(k, id);
  return id;
}

int GraphBuilder::add_edge(const std::vector<Vec3>& world_polyline) {
  return add_edge(world_polyline, polyline_length(world_polyline));
}

int GraphBuilder::add_edge(const std::vector<Vec3>& world_polyline, double length) {
  if (world_polyline.size() < 2) fail(ErrorCode::InvalidArgument, "edge polyline needs two points");
  Shift ca, cb;
  int tail = vertex(world_polyline.front(), &ca);
  int head = vertex(world_polyline.back(), &cb);
  Shift shift = cb - ca;
  if (tail == head && shift.isZero() && length <= tol_) return -1;
  GraphEdge e;
  e.tail = tail;
  e.head = head;
  e.shift = shift;
  e.length = length;
  Vec3 offset = ca.cast<double>();
  e.polyline.reserve(world_polyline.size());
  for (const auto& p : world_polyline) e.polyline.push_back(p - offset);
  e.polyline.front() = graph_.vertices[tail];
  e.polyline.back() = graph_.vertices[head] + shift.cast<double>();
  graph_.edges.push_back(std::move(e));
  return graph_.num_edges() - 1;
}

PeriodicGraph GraphBuilder::take() {
  index_.clear();
  return std::move(graph_);
}

namespace {

// Polyline of an arc in the frame where the arc's source vertex sits in cell `at`.
void append_arc_polyline(const GraphEdge& e, bool forward, const Shift& at, std::vector<Vec3>& out) {
  Vec3 off = at.cast<double>();
  std::size_t n = e.polyline.size();
  bool skip_first = !out.empty();
  for (std::size_t i = skip_first ? 1 : 0; i < n; ++i) {
    Vec3 p = forward ? e.polyline[i] : Vec3(e.polyline[n - 1 - i] - e.shift.cast<double>());
    out.push_back(p + off);
  }
}

}  // namespace

PeriodicGraph contract_chains(const PeriodicGraph& g) {
  Adjacency adj = build_adjacency(g);
  int n = g.num_vertices();
  std::vector<char> keep(n), used(g.num_edges(), 0);
  for (int v = 0; v < n; ++v) keep[v] = adj.degree(v) != 2;

  std::vector<GraphEdge> merged;
  auto walk = [&](int start, const Arc& first) {
    GraphEdge ne;
    ne.tail = start;
    Shift acc = Shift::Zero();
    const Arc* arc = &first;
    int cur = start;
    while (true) {
      used[arc->edge] = 1;
      append_arc_polyline(g.edges[arc->edge], arc->forward, acc, ne.polyline);
      ne.length += arc->length;
      acc += arc->shift;
      int came = arc->edge;
      cur = arc->to;
      if (keep[cur]) break;
      const Arc* next = nullptr;
      for (const Arc* a = adj.begin(cur); a != adj.end(cur); ++a) {
        if (a->edge != came) next = a;
      }
      if (!next || used[next->edge]) break;
      arc = next;
    }
    ne.head = cur;
    ne.shift = acc;
    merged.push_back(std::move(ne));
  };

  for (int v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    for (const Arc* a = adj.begin(v); a != adj.end(v); ++a) {
      if (!used[a->edge]) walk(v, *a);
    }
  }
  for (int i = 0; i < g.num_edges(); ++i) {
    if (used[i]) continue;
    int v = g.edges[i].tail;
    keep[v] = 1;
    for (const Arc* a = adj.begin(v); a != adj.end(v); ++a) {
      if (!used[a->edge]) walk(v, *a);
    }
  }

  std::vector<int> remap(n, -1);
  PeriodicGraph out;
  out.dim = g.dim;
  out.level = g.level;
  out.is_surface_mesh = g.is_surface_mesh;
  out.notes = g.notes;
  for (int v = 0; v < n; ++v) {
    if (keep[v]) {
      remap[v] = out.num_vertices();
      out.vertices.push_back(g.vertices[v]);
    }
  }
  for (auto& e : merged) {
    e.tail = remap[e.tail];
    e.head = remap[e.head];
    out.edges.push_back(std::move(e));
  }
  return out;
}

PeriodicGraph split_long_edges(const PeriodicGraph& g, double max_length) {
  if (!(max_length > 0.0)) fail(ErrorCode::InvalidArgument, "max_length must be positive");
  GraphBuilder b(g.dim, 1e-10);
  for (const auto& v : g.vertices) b.vertex(v);
  for (const auto& e : g.edges) {
    int pieces = static_cast<int>(std::ceil(e.length / max_length - 1e-9));
    if (pieces <= 1 || e.polyline.size() < 2) {
      b.graph().edges.push_back(e);
      continue;
    }
    double total = polyline_length(e.polyline);
    if (!(total > 0.0)) {
      b.graph().edges.push_back(e);
      continue;
    }
    double piece_len = e.length / pieces;
    std::vector<Vec3> cur{e.polyline.front()};
    double walked = 0.0;
    int k = 1;
    for (std::size_t i = 0; i + 1 < e.polyline.size(); ++i) {
      Vec3 a = e.polyline[i], c = e.polyline[i + 1];
      double seg = (c - a).norm();
      while (k < pieces && walked + seg >= total * k / pieces) {
        double t = seg > 0.0 ? (total * k / pieces - walked) / seg : 0.0;
        Vec3 p = a + t * (c - a);
        cur.push_back(p);
        b.add_edge(cur, piece_len);
        cur = {p};
        ++k;
      }
      cur.push_back(c);
      walked += seg;
    }
    b.add_edge(cur, piece_len);
  }
  PeriodicGraph out = b.take();
  out.level = g.level;
  out.is_surface_mesh = g.is_surface_mesh;
  out.notes = g.notes;
  return out;
}

PeriodicGraph dedupe_edges(const PeriodicGraph& g, double length_tol) {
  PeriodicGraph out = g;
  out.edges.clear();
  std::map<std::array<int, 5>, std::vector<double>> seen;
  for (const auto& e : g.edges) {
    // Orient so that (tail, shift) is lexicographically canonical.
    bool flip = e.head < e.tail || (e.head == e.tail && std::lexicographical_compare(
                                                           e.shift.data(), e.shift.data() + 3,
                                                           Shift(-e.shift).data(), Shift(-e.shift).data() + 3));
    int a = flip ? e.head : e.tail;
    int b = flip ? e.tail : e.head;
    Shift s = flip ? Shift(-e.shift) : e.shift;
    auto& lens = seen[{a, b, s[0], s[1], s[2]}];
    bool dup = std::any_of(lens.begin(), lens.end(), [&](double l) { return std::abs(l - e.length) <= length_tol; });
    if (dup) continue;
    lens.push_back(e.length);
    out.edges.push_back(e);
  }
  return out;
}

PeriodicGraph drop_isolated(const PeriodicGraph& g) {
  std::vector<int> deg(g.num_vertices(), 0);
  for (const auto& e : g.edges) {
    ++deg[e.tail];
    ++deg[e.head];
  }
  std::vector<int> remap(g.num_vertices(), -1);
  PeriodicGraph out;
  out.dim = g.dim;
  out.level = g.level;
  out.is_surface_mesh = g.is_surface_mesh;
  out.notes = g.notes;
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (deg[v] > 0) {
      remap[v] = out.num_vertices();
      out.vertices.push_back(g.vertices[v]);
    }
  }
  for (auto e : g.edges) {
    e.tail = remap[e.tail];
    e.head = remap[e.head];
    out.edges.push_back(std::move(e));
  }
  return out;
}

}  // namespace oschom
