#include "oschom/levelset.hpp"

#include "oschom/error.hpp"
#include "oschom/geodesic.hpp"
#include "oschom/lattice.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace oschom {

namespace {

// Root of phi - z on the segment a -> b where the end values have opposite
// signs: linear interpolation refined by a few Illinois steps.
Vec3 side_crossing(const PeriodicConstraint& phi, double z, const Vec3& a, const Vec3& b, double fa, double fb) {
  double ta = 0.0, tb = 1.0;
  int side = 0;
  double t = fa / (fa - fb);
  for (int it = 0; it < 30; ++it) {
    t = (ta * fb - tb * fa) / (fb - fa);
    double ft = phi.value(a + t * (b - a)) - z;
    if (ft == 0.0 || std::abs(tb - ta) < 1e-13) break;
    if ((ft > 0.0) == (fb > 0.0)) {
      tb = t;
      fb = ft;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      ta = t;
      fa = ft;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  return a + t * (b - a);
}

int sign_of(double v, double tol) { return v > tol ? 1 : (v < -tol ? -1 : 0); }

struct BoundaryEvent {
  std::vector<Vec3> points;  // one point, or the corners of a zero run
  int before = 0;
  int after = 0;
};

}  // namespace

PeriodicGraph extract_level_graph(const PeriodicConstraint& phi, double z, int resolution,
                                  const LevelGraphOptions& opts) {
  if (phi.dim() != 2) fail(ErrorCode::UnsupportedKind, "contour extraction is only available for m = 2");
  if (resolution < 16) fail(ErrorCode::InvalidArgument, "level extraction needs resolution >= 16");
  Interval range = image_range(phi, resolution);
  double width = std::max(range.hi - range.lo, 1e-300);
  if (z < range.lo - 1e-12 * width || z > range.hi + 1e-12 * width) {
    fail(ErrorCode::LevelOutOfRange, "level " + std::to_string(z) + " outside image [" + std::to_string(range.lo) +
                                         ", " + std::to_string(range.hi) + "]");
  }
  const int n = resolution;
  const double h = 1.0 / n;
  const double tol = opts.node_tolerance * std::max(width, 1.0);

  std::vector<double> f(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(j) * n + i] = phi.value(vec2(i * h, j * h)) - z;
  }
  auto fv = [&](int i, int j) { return f[static_cast<std::size_t>(((j % n) + n) % n) * n + ((i % n) + n) % n]; };
  auto node = [&](int i, int j) { return vec2(i * h, j * h); };

  GraphBuilder builder(2, 1e-9);
  bool touched_nodes = false;

  // Grid sides lying on the level.
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (sign_of(fv(i, j), tol) != 0) continue;
      touched_nodes = true;
      builder.vertex(node(i, j));
      for (int d = 0; d < 2; ++d) {
        int ii = i + (d == 0 ? 1 : 0), jj = j + (d == 1 ? 1 : 0);
        if (sign_of(fv(ii, jj), tol) != 0) continue;
        Vec3 mid = 0.5 * (node(i, j) + node(ii, jj));
        if (std::abs(phi.value(mid) - z) <= std::max(tol, 1e-9 * width)) builder.add_segment(node(i, j), node(ii, jj));
      }
    }
  }

  const int corner_off[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      std::array<Vec3, 4> cp;
      std::array<double, 4> cf;
      std::array<int, 4> cs;
      int zeros = 0;
      for (int k = 0; k < 4; ++k) {
        cp[k] = node(i + corner_off[k][0], j + corner_off[k][1]);
        cf[k] = fv(i + corner_off[k][0], j + corner_off[k][1]);
        cs[k] = sign_of(cf[k], tol);
        if (cs[k] == 0) ++zeros;
      }
      if (zeros == 0) {
        bool all_same = true;
        for (int k = 1; k < 4; ++k) all_same = all_same && cs[k] == cs[0];
        if (all_same) continue;
      }
      if (zeros == 4) continue;

      // Walk the boundary counter-clockwise as a cyclic list of items.
      struct Item {
        int kind;  // 0 signed, 1 zero corner, 2 zero side, 3 crossing
        int sign;
        Vec3 point;
      };
      std::vector<Item> items;
      for (int k = 0; k < 4; ++k) {
        int k1 = (k + 1) % 4;
        items.push_back(cs[k] == 0 ? Item{1, 0, cp[k]} : Item{0, cs[k], cp[k]});
        if (cs[k] != 0 && cs[k1] != 0 && cs[k] != cs[k1]) {
          // Canonical orientation so the shared side yields identical points.
          bool flip = (cp[k1][1] < cp[k][1]) || (cp[k1][1] == cp[k][1] && cp[k1][0] < cp[k][0]);
          Vec3 x = flip ? side_crossing(phi, z, cp[k1], cp[k], cf[k1], cf[k])
                        : side_crossing(phi, z, cp[k], cp[k1], cf[k], cf[k1]);
          items.push_back({3, 0, x});
          items.push_back({0, cs[k1], cp[k1]});
        } else if (cs[k] == 0 && cs[k1] == 0) {
          Vec3 mid = 0.5 * (cp[k] + cp[k1]);
          double fm = phi.value(mid) - z;
          int sm = sign_of(fm, std::max(tol, 1e-9 * width));
          items.push_back(sm == 0 ? Item{2, 0, mid} : Item{0, sm, mid});
        }
      }
      std::size_t start = 0;
      while (items[start].kind != 0) ++start;
      std::rotate(items.begin(), items.begin() + static_cast<long>(start), items.end());

      std::vector<BoundaryEvent> events;
      int last_sign = items.front().sign;
      for (std::size_t t = 0; t < items.size();) {
        const Item& it = items[t];
        if (it.kind == 0) {
          last_sign = it.sign;
          if (!events.empty() && events.back().after == 0) events.back().after = it.sign;
          ++t;
          continue;
        }
        BoundaryEvent ev;
        ev.before = last_sign;
        if (it.kind == 3) {
          ev.points.push_back(it.point);
          ++t;
        } else {
          while (t < items.size() && (items[t].kind == 1 || items[t].kind == 2)) {
            if (items[t].kind == 1) ev.points.push_back(items[t].point);
            ++t;
          }
        }
        events.push_back(ev);
      }
      if (!events.empty() && events.back().after == 0) events.back().after = items.front().sign;

      std::vector<int> active;
      for (int e = 0; e < static_cast<int>(events.size()); ++e) {
        if (events[e].before != events[e].after) active.push_back(e);
      }
      auto attach = [&](const BoundaryEvent& ev, const Vec3& toward) {
        const Vec3* best = &ev.points.front();
        for (const auto& p : ev.points) {
          if ((p - toward).norm() < (*best - toward).norm()) best = &p;
        }
        return *best;
      };
      auto centroid = [](const BoundaryEvent& ev) {
        Vec3 c = Vec3::Zero();
        for (const auto& p : ev.points) c += p;
        return Vec3(c / static_cast<double>(ev.points.size()));
      };
      auto connect = [&](const BoundaryEvent& a, const BoundaryEvent& b) {
        Vec3 pa = attach(a, centroid(b));
        Vec3 pb = attach(b, pa);
        if ((pa - pb).norm() > 1e-12) builder.add_segment(pa, pb);
      };
      if (active.size() == 2) {
        connect(events[active[0]], events[active[1]]);
      } else if (active.size() == 4) {
        Vec3 center = vec2((i + 0.5) * h, (j + 0.5) * h);
        double fc = phi.value(center) - z;
        int sc = sign_of(fc, std::max(tol, 1e-9 * width));
        if (sc == 0) {
          for (int e : active) {
            Vec3 p = attach(events[e], center);
            if ((p - center).norm() > 1e-12) builder.add_segment(p, center);
          }
        } else if (sc == events[active[0]].after) {
          connect(events[active[1]], events[active[2]]);
          connect(events[active[3]], events[active[0]]);
        } else {
          connect(events[active[0]], events[active[1]]);
          connect(events[active[2]], events[active[3]]);
        }
      }
    }
  }

  PeriodicGraph raw = builder.take();
  raw.level = z;
  if (touched_nodes) raw.notes.push_back("level passes through grid nodes; they are kept as on-level vertices");
  PeriodicGraph out = contract_chains(raw);
  if (opts.max_edge_length > 0.0) out = split_long_edges(out, opts.max_edge_length);
  out.level = z;
  return out;
}

ComponentReport classify_components(const PeriodicGraph& g) {
  ComponentReport rep;
  int n = g.num_vertices();
  Adjacency adj = build_adjacency(g);
  rep.component_of.assign(n, -1);
  std::vector<Shift> lift(n, Shift::Zero());
  for (int root = 0; root < n; ++root) {
    if (rep.component_of[root] >= 0) continue;
    int cid = static_cast<int>(rep.components.size());
    Component comp;
    std::vector<Shift> cycles;
    std::vector<int> stack{root};
    rep.component_of[root] = cid;
    lift[root] = Shift::Zero();
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      comp.vertices.push_back(v);
      comp.lift.push_back(lift[v]);
      for (const Arc* a = adj.begin(v); a != adj.end(v); ++a) {
        Shift reach = lift[v] + a->shift;
        if (rep.component_of[a->to] < 0) {
          rep.component_of[a->to] = cid;
          lift[a->to] = reach;
          stack.push_back(a->to);
        } else {
          Shift cyc = reach - lift[a->to];
          if (!cyc.isZero()) cycles.push_back(cyc);
        }
      }
    }
    LatticeBasis basis = lattice_basis(cycles, g.dim);
    comp.translation_rank = basis.rank;
    comp.generators = basis.generators;
    if (comp.unbounded()) ++rep.num_unbounded;
    rep.components.push_back(std::move(comp));
  }
  rep.satisfies_non_degenerate = rep.num_unbounded == 1;
  return rep;
}

double estimate_length_constant(const PeriodicGraph& g, int num_pairs, std::uint64_t seed) {
  ComponentReport rep = classify_components(g);
  std::vector<int> pool;
  for (const auto& c : rep.components) {
    if (c.unbounded()) pool.insert(pool.end(), c.vertices.begin(), c.vertices.end());
  }
  if (pool.empty()) fail(ErrorCode::NoUnboundedComponent, "graph has no unbounded component");
  std::vector<Shift> lift(g.num_vertices(), Shift::Zero());
  for (const auto& c : rep.components) {
    for (std::size_t i = 0; i < c.vertices.size(); ++i) lift[c.vertices[i]] = c.lift[i];
  }
  LiftedGraphSearch search(g);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(pool.size()) - 1);
  std::uniform_int_distribution<int> step(-3, 3);
  double best = 1.0;
  int done = 0;
  for (int attempt = 0; done < num_pairs && attempt < 50 * num_pairs; ++attempt) {
    int u = pool[pick(rng)];
    int v = pool[pick(rng)];
    int cu = rep.component_of[u];
    if (rep.component_of[v] != cu) continue;
    // Stay inside one lifted copy of the component.
    Shift c = lift[v] - lift[u];
    for (const auto& gen : rep.components[cu].generators) c += step(rng) * gen;
    Vec3 pu = g.vertices[u];
    Vec3 pv = g.vertices[v] + c.cast<double>();
    double eu = (pv - pu).norm();
    if (eu < 1.0) continue;
    SearchOptions so;
    so.length_constant = 3.0;
    double d = search.distances({{u, Shift::Zero()}}, {{pv, 0.0}}, so).front();
    ++done;
    if (std::isfinite(d)) best = std::max(best, d / eu);
  }
  return best;
}

}  // namespace oschom
