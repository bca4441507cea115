#pragma once

// Reference implementations kept independent of the library's algorithms.

#include "oschom/periodic_graph.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <tuple>
#include <vector>

namespace oracle {

using oschom::Vec3;

struct Window {
  using Key = std::tuple<int, int, int, int>;  // vertex, cell
  std::map<Key, std::vector<std::pair<Key, double>>> adj;
  std::map<Key, Vec3> pos;
};

// Every lifted vertex whose cell lies in [lo, hi]^dim, with explicit adjacency.
inline Window build_window(const oschom::PeriodicGraph& g, int lo, int hi) {
  Window w;
  int kz_lo = g.dim == 3 ? lo : 0, kz_hi = g.dim == 3 ? hi : 0;
  auto in_window = [&](int i, int j, int k) {
    return i >= lo && i <= hi && j >= lo && j <= hi && k >= kz_lo && k <= kz_hi;
  };
  for (int i = lo; i <= hi; ++i) {
    for (int j = lo; j <= hi; ++j) {
      for (int k = kz_lo; k <= kz_hi; ++k) {
        for (int v = 0; v < g.num_vertices(); ++v) w.pos[{v, i, j, k}] = g.vertices[v] + Vec3(i, j, k);
        for (const auto& e : g.edges) {
          int ni = i + e.shift(0), nj = j + e.shift(1), nk = k + e.shift(2);
          if (!in_window(ni, nj, nk)) continue;
          Window::Key u{e.tail, i, j, k}, v{e.head, ni, nj, nk};
          w.adj[u].push_back({v, e.length});
          w.adj[v].push_back({u, e.length});
        }
      }
    }
  }
  return w;
}

// Plain Dijkstra from a set of window vertices.
inline std::map<Window::Key, double> dijkstra(const Window& w, const std::vector<Window::Key>& sources) {
  using Key = Window::Key;
  std::map<Key, double> dist;
  using Item = std::pair<double, Key>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (const auto& s : sources) {
    dist[s] = 0.0;
    pq.push({0.0, s});
  }
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    auto it = w.adj.find(u);
    if (it == w.adj.end()) continue;
    for (const auto& [v, len] : it->second) {
      auto jt = dist.find(v);
      if (jt == dist.end() || d + len < jt->second) {
        dist[v] = d + len;
        pq.push({d + len, v});
      }
    }
  }
  return dist;
}

inline double window_distance(const oschom::PeriodicGraph& g, const Vec3& a, double ra, const Vec3& b, double rb,
                              int lo, int hi) {
  Window w = build_window(g, lo, hi);
  std::vector<Window::Key> sources;
  for (const auto& [key, p] : w.pos) {
    if ((p - a).norm() <= ra + 1e-9) sources.push_back(key);
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [key, d] : dijkstra(w, sources)) {
    if ((w.pos.at(key) - b).norm() <= rb + 1e-9) best = std::min(best, d);
  }
  return best;
}

// Exhaustive max of graph distance over Euclidean distance for vertex pairs
// at distance >= 1, sources in the unit cell and targets within `reach` cells.
inline double max_detour_ratio(const oschom::PeriodicGraph& g, int reach) {
  Window w = build_window(g, -reach - 2, reach + 2);
  double best = 1.0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    Window::Key s{v, 0, 0, 0};
    Vec3 ps = w.pos.at(s);
    for (const auto& [key, d] : dijkstra(w, {s})) {
      Vec3 pt = w.pos.at(key);
      if (std::abs(std::get<1>(key)) > reach || std::abs(std::get<2>(key)) > reach) continue;
      double e = (pt - ps).norm();
      if (e >= 1.0) best = std::max(best, d / e);
    }
  }
  return best;
}

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Total polyline length of a graph's edges (one copy per edge).
inline double total_length(const oschom::PeriodicGraph& g) {
  double L = 0.0;
  for (const auto& e : g.edges) {
    for (std::size_t i = 1; i < e.polyline.size(); ++i) L += (e.polyline[i] - e.polyline[i - 1]).norm();
  }
  return L;
}

}  // namespace oracle
