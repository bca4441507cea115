#include "oschom/geodesic.hpp"

#include "oschom/error.hpp"
#include "oschom/lattice.hpp"
#include "oschom/levelset.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>
#include <unordered_map>

namespace oschom {

namespace {

// Boxes up to this many lifted vertices use flat arrays; larger boxes keep
// only the vertices the search touches.
constexpr long long kDenseLimit = 20'000'000;
constexpr std::size_t kSparseLimit = 40'000'000;

class NodeStore {
 public:
  NodeStore(long long total, bool track) : dense_(total <= kDenseLimit), track_(track) {
    if (dense_) {
      dist_.assign(static_cast<std::size_t>(total), kInf);
      if (track_) {
        parent_.assign(static_cast<std::size_t>(total), -1);
        arc_.assign(static_cast<std::size_t>(total), -1);
      }
    } else {
      map_.reserve(1 << 20);
    }
  }

  double dist(long long id) const {
    if (dense_) return dist_[id];
    auto it = map_.find(id);
    return it == map_.end() ? kInf : it->second.dist;
  }

  void set(long long id, double d, long long parent, int arc) {
    if (dense_) {
      dist_[id] = d;
      if (track_) {
        parent_[id] = parent;
        arc_[id] = arc;
      }
      return;
    }
    map_[id] = {d, parent, arc};
    if (map_.size() > kSparseLimit) fail(ErrorCode::InvalidArgument, "shortest-path search exceeded its node budget");
  }

  long long parent(long long id) const {
    if (dense_) return parent_[id];
    auto it = map_.find(id);
    return it == map_.end() ? -1 : it->second.parent;
  }

  int arc(long long id) const {
    if (dense_) return arc_[id];
    auto it = map_.find(id);
    return it == map_.end() ? -1 : it->second.arc;
  }

 private:
  struct Rec {
    double dist;
    long long parent;
    int arc;
  };
  bool dense_;
  bool track_;
  std::vector<double> dist_;
  std::vector<long long> parent_;
  std::vector<int> arc_;
  std::unordered_map<long long, Rec> map_;
};

bool inside(const Vec3& p, const Ball& b) {
  return (p - b.center).norm() <= b.radius * (1.0 + 1e-9) + 1e-12;
}

double admissible_radius(int dim) { return std::sqrt(static_cast<double>(dim)); }

}  // namespace

long long LiftedGraphSearch::Box::cells() const {
  long long n = 1;
  for (int a = 0; a < 3; ++a) n *= static_cast<long long>(hi[a] - lo[a] + 1);
  return n;
}

LiftedGraphSearch::LiftedGraphSearch(const PeriodicGraph& g) : g_(g), adj_(build_adjacency(g)) {}

std::vector<LiftedVertex> LiftedGraphSearch::vertices_in_ball(const Ball& b) const {
  std::vector<LiftedVertex> out;
  int dim = g_.dim;
  Shift lo = Shift::Zero(), hi = Shift::Zero();
  for (int a = 0; a < dim; ++a) {
    lo[a] = static_cast<int>(std::floor(b.center[a] - b.radius)) - 1;
    hi[a] = static_cast<int>(std::floor(b.center[a] + b.radius)) + 1;
  }
  for (int i = lo[0]; i <= hi[0]; ++i) {
    for (int j = lo[1]; j <= hi[1]; ++j) {
      for (int k = lo[2]; k <= hi[2]; ++k) {
        Shift c(i, j, k);
        for (int v = 0; v < g_.num_vertices(); ++v) {
          if (inside(g_.vertices[v] + c.cast<double>(), b)) out.push_back({v, c});
        }
      }
    }
  }
  return out;
}

int LiftedGraphSearch::default_margin(const std::vector<LiftedVertex>& sources, const std::vector<Ball>& targets,
                                      const SearchOptions& opts) const {
  if (opts.margin_cells >= 0) return opts.margin_cells;
  Vec3 s = Vec3::Zero();
  for (const auto& v : sources) s += position(v);
  if (!sources.empty()) s /= static_cast<double>(sources.size());
  double reach = 0.0;
  for (const auto& t : targets) reach = std::max(reach, (t.center - s).norm());
  double c = std::max(opts.length_constant, 1.0);
  double widen = std::sqrt(std::max(c * c - 1.0, 0.25));
  return 2 + static_cast<int>(std::ceil(0.5 * reach * widen));
}

LiftedGraphSearch::Box LiftedGraphSearch::make_box(const std::vector<LiftedVertex>& sources,
                                                   const std::vector<Ball>& targets, int margin) const {
  Box box;
  int dim = g_.dim;
  Vec3 lo = Vec3::Constant(kInf), hi = Vec3::Constant(-kInf);
  for (const auto& v : sources) {
    Vec3 p = position(v);
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  for (const auto& t : targets) {
    lo = lo.cwiseMin(t.center - Vec3::Constant(t.radius));
    hi = hi.cwiseMax(t.center + Vec3::Constant(t.radius));
  }
  for (int a = 0; a < dim; ++a) {
    box.lo[a] = static_cast<int>(std::floor(lo[a])) - margin;
    box.hi[a] = static_cast<int>(std::floor(hi[a])) + margin;
  }
  return box;
}

std::vector<double> LiftedGraphSearch::run(const std::vector<LiftedVertex>& sources, const std::vector<Ball>& targets,
                                           const Box& box, PathResult* path) const {
  const int nv = g_.num_vertices();
  const long long ncells = box.cells();
  const long long total = ncells * nv;
  const int sx = box.hi[0] - box.lo[0] + 1;
  const int sy = box.hi[1] - box.lo[1] + 1;

  auto cell_index = [&](const Shift& c) -> long long {
    for (int a = 0; a < 3; ++a) {
      if (c[a] < box.lo[a] || c[a] > box.hi[a]) return -1;
    }
    return (static_cast<long long>(c[2] - box.lo[2]) * sy + (c[1] - box.lo[1])) * sx + (c[0] - box.lo[0]);
  };
  auto cell_of = [&](long long lin) {
    Shift c;
    c[0] = static_cast<int>(lin % sx) + box.lo[0];
    lin /= sx;
    c[1] = static_cast<int>(lin % sy) + box.lo[1];
    c[2] = static_cast<int>(lin / sy) + box.lo[2];
    return c;
  };

  // Heuristic: distance to the target set, using the capsule through the
  // first and last centre when the targets are collinear.
  bool capsule = targets.size() > 1;
  Vec3 c0 = targets.front().center, c1 = targets.back().center;
  double rmin = kInf;
  for (const auto& t : targets) rmin = std::min(rmin, t.radius);
  if (capsule) {
    Vec3 d = c1 - c0;
    double len2 = d.squaredNorm();
    for (const auto& t : targets) {
      double s = len2 > 0.0 ? std::clamp((t.center - c0).dot(d) / len2, 0.0, 1.0) : 0.0;
      if ((t.center - (c0 + s * d)).norm() > 1e-9) capsule = false;
    }
  }
  auto heuristic = [&](const Vec3& p) {
    if (capsule) {
      Vec3 d = c1 - c0;
      double len2 = d.squaredNorm();
      double s = len2 > 0.0 ? std::clamp((p - c0).dot(d) / len2, 0.0, 1.0) : 0.0;
      return std::max(0.0, (p - (c0 + s * d)).norm() - rmin);
    }
    double h = kInf;
    for (const auto& t : targets) h = std::min(h, std::max(0.0, (p - t.center).norm() - t.radius));
    return h;
  };

  NodeStore store(total, path != nullptr);
  using Entry = std::tuple<double, double, long long>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (const auto& s : sources) {
    long long ci = cell_index(s.cell);
    if (ci < 0) continue;
    long long id = ci * nv + s.vertex;
    if (store.dist(id) > 0.0) {
      store.set(id, 0.0, -1, -1);
      heap.emplace(heuristic(position(s)), 0.0, id);
    }
  }

  std::vector<double> best(targets.size(), kInf);
  long long best_node = -1;
  while (!heap.empty()) {
    auto [f, gval, id] = heap.top();
    heap.pop();
    if (gval > store.dist(id)) continue;
    double worst = 0.0;
    for (double b : best) worst = std::max(worst, b);
    if (f >= worst) break;
    int v = static_cast<int>(id % nv);
    Shift cell = cell_of(id / nv);
    Vec3 p = g_.vertices[v] + cell.cast<double>();
    for (std::size_t k = 0; k < targets.size(); ++k) {
      if (gval < best[k] && inside(p, targets[k])) {
        best[k] = gval;
        if (k == 0) best_node = id;
      }
    }
    for (const Arc* a = adj_.begin(v); a != adj_.end(v); ++a) {
      Shift nc = cell + a->shift;
      long long ci = cell_index(nc);
      if (ci < 0) continue;
      long long nid = ci * nv + a->to;
      double ng = gval + a->length;
      if (ng < store.dist(nid)) {
        store.set(nid, ng, id, static_cast<int>(a - adj_.arcs.data()));
        heap.emplace(ng + heuristic(g_.vertices[a->to] + nc.cast<double>()), ng, nid);
      }
    }
  }

  if (path && best_node >= 0) {
    path->length = best[0];
    std::vector<long long> chain;
    for (long long id = best_node; id >= 0; id = store.parent(id)) chain.push_back(id);
    std::reverse(chain.begin(), chain.end());
    path->vertices.clear();
    path->polyline.clear();
    for (std::size_t i = 0; i < chain.size(); ++i) {
      long long id = chain[i];
      LiftedVertex lv{static_cast<int>(id % nv), cell_of(id / nv)};
      path->vertices.push_back(lv);
      if (i == 0) {
        path->polyline.push_back(position(lv));
        continue;
      }
      const Arc& arc = adj_.arcs[store.arc(id)];
      const GraphEdge& e = g_.edges[arc.edge];
      Shift from_cell = cell_of(chain[i - 1] / nv);
      Vec3 off = from_cell.cast<double>();
      std::size_t n = e.polyline.size();
      for (std::size_t j = 1; j < n; ++j) {
        Vec3 q = arc.forward ? e.polyline[j] : Vec3(e.polyline[n - 1 - j] - e.shift.cast<double>());
        path->polyline.push_back(q + off);
      }
    }
  }
  return best;
}

std::vector<double> LiftedGraphSearch::distances(const std::vector<LiftedVertex>& sources,
                                                 const std::vector<Ball>& targets, const SearchOptions& opts) const {
  if (targets.empty()) return {};
  if (sources.empty()) fail(ErrorCode::EmptyAdmissibleSet, "no admissible source vertex");
  int margin = default_margin(sources, targets, opts);
  std::vector<double> d = run(sources, targets, make_box(sources, targets, margin), nullptr);
  bool missing = std::any_of(d.begin(), d.end(), [](double x) { return !std::isfinite(x); });
  if (missing && opts.allow_doubling) d = run(sources, targets, make_box(sources, targets, 2 * margin + 2), nullptr);
  return d;
}

PathResult LiftedGraphSearch::path(const std::vector<LiftedVertex>& sources, const Ball& target,
                                   const SearchOptions& opts) const {
  if (sources.empty()) fail(ErrorCode::EmptyAdmissibleSet, "no admissible source vertex");
  std::vector<Ball> targets{target};
  int margin = default_margin(sources, targets, opts);
  PathResult out;
  run(sources, targets, make_box(sources, targets, margin), &out);
  if (!std::isfinite(out.length) && opts.allow_doubling) {
    run(sources, targets, make_box(sources, targets, 2 * margin + 2), &out);
  }
  return out;
}

double min_path_length(const PeriodicGraph& g, const Ball& source, const Ball& target, const SearchOptions& opts) {
  LiftedGraphSearch search(g);
  auto sources = search.vertices_in_ball(source);
  if (sources.empty()) fail(ErrorCode::EmptyAdmissibleSet, "no admissible vertex in the source ball");
  if (search.vertices_in_ball(target).empty()) {
    fail(ErrorCode::EmptyAdmissibleSet, "no admissible vertex in the target ball");
  }
  return search.distances(sources, {target}, opts).front();
}

std::vector<double> ray_lengths(const LiftedGraphSearch& search, const Vec3& w, const std::vector<double>& Ts,
                                const SearchOptions& opts) {
  double r = admissible_radius(search.graph().dim);
  auto sources = search.vertices_in_ball({Vec3::Zero(), r});
  if (sources.empty()) fail(ErrorCode::EmptyAdmissibleSet, "no admissible vertex near the origin");
  std::vector<Ball> targets;
  targets.reserve(Ts.size());
  for (double T : Ts) targets.push_back({T * w, r});
  return search.distances(sources, targets, opts);
}

double psi_T_z(const PeriodicGraph& g, const Vec3& w, double T, const SearchOptions& opts, std::string* diagnostic) {
  if (!(T > 0.0)) fail(ErrorCode::InvalidArgument, "T must be positive");
  LiftedGraphSearch search(g);
  double L = kInf;
  try {
    L = ray_lengths(search, w, {T}, opts).front();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyAdmissibleSet) throw;
    if (diagnostic) *diagnostic = e.what();
    return kInf;
  }
  return std::isfinite(L) ? (L * L) / (T * T) : kInf;
}

StableNormEstimate stable_norm(const PeriodicGraph& g, const Vec3& w, const StableNormOptions& opts) {
  LiftedGraphSearch search(g);
  return stable_norm(search, w, opts);
}

std::vector<double> default_schedule(int dim) {
  if (dim == 3) return {5.0, 10.0, 20.0, 40.0};
  return {10.0, 20.0, 40.0, 80.0};
}

StableNormEstimate stable_norm(const LiftedGraphSearch& search, const Vec3& w, const StableNormOptions& opts) {
  int dim = search.graph().dim;
  std::vector<double> sched = opts.schedule.empty() ? default_schedule(dim) : opts.schedule;
  std::sort(sched.begin(), sched.end());
  if (!(sched.front() > 0.0)) fail(ErrorCode::InvalidArgument, "T schedule must be positive");
  double c = opts.length_constant;
  double c1 = std::pow(4.0 * std::sqrt(static_cast<double>(dim)) + w.norm(), 2) * c * c;

  StableNormEstimate est;
  est.schedule = sched;
  est.error_bound = c1 / sched.back();
  if (w.norm() == 0.0) {
    est.psi_T.assign(sched.size(), 0.0);
    return est;
  }

  std::vector<double> Ts = sched;
  int extra = std::max(0, opts.regression_samples);
  for (int i = 0; i < extra && sched.size() > 1; ++i) {
    Ts.push_back(sched.front() + (sched.back() - sched.front()) * (i + 0.5) / extra);
  }
  std::sort(Ts.begin(), Ts.end());
  Ts.erase(std::unique(Ts.begin(), Ts.end()), Ts.end());

  SearchOptions so;
  so.length_constant = c;
  std::vector<double> L = ray_lengths(search, w, Ts, so);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    if (!std::isfinite(L[i])) continue;
    sx += Ts[i];
    sy += L[i];
    sxx += Ts[i] * Ts[i];
    sxy += Ts[i] * L[i];
    ++n;
  }
  if (n == 0) fail(ErrorCode::Unreachable, "no admissible path along the requested direction");

  for (double T : sched) {
    auto it = std::find(Ts.begin(), Ts.end(), T);
    double l = L[static_cast<std::size_t>(it - Ts.begin())];
    est.psi_T.push_back(std::isfinite(l) ? l * l / (T * T) : kInf);
  }
  double lmax = L[Ts.size() - 1];
  double slope = kInf;
  if (n >= 2) {
    double den = n * sxx - sx * sx;
    slope = den > 0.0 ? (n * sxy - sx * sy) / den : kInf;
  }
  if (!std::isfinite(slope) || slope <= 0.0) {
    slope = std::isfinite(lmax) ? lmax / Ts.back() : kInf;
  }
  est.norm = slope;
  est.psi = slope * slope;
  est.psi_at_max_T = est.psi_T.back();
  for (std::size_t i = 0; i < sched.size(); ++i) {
    if (est.psi > est.psi_T[i] + c1 / sched[i] + 1e-12) est.envelope_ok = false;
  }
  if (!std::isfinite(est.psi)) fail(ErrorCode::Unreachable, "stable norm undefined along the requested direction");
  return est;
}

Vec3 sign_normalized(const Vec3& w) {
  double scale = w.cwiseAbs().maxCoeff();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(w[i]) > 1e-14 * scale) return w[i] < 0.0 ? Vec3(-w) : w;
  }
  return w;
}

double psi_hom_z(const PeriodicGraph& g, const Vec3& w, const StableNormOptions& opts, const ComponentReport* report) {
  LiftedGraphSearch search(g);
  if (report) return psi_hom_z(search, *report, w, opts);
  ComponentReport own = classify_components(g);
  return psi_hom_z(search, own, w, opts);
}

double psi_hom_z(const LiftedGraphSearch& search, const ComponentReport& report, const Vec3& w,
                 const StableNormOptions& opts, StableNormEstimate* detail) {
  double len = w.norm();
  if (len == 0.0) return 0.0;
  Vec3 u = sign_normalized(w / len);
  bool spanned = false;
  for (const auto& comp : report.components) {
    if (comp.translation_rank == 0) continue;
    LatticeBasis basis{comp.translation_rank, comp.generators};
    if (in_real_span(basis, u, 1e-9)) {
      spanned = true;
      break;
    }
  }
  if (!spanned) return kInf;
  try {
    StableNormEstimate est = stable_norm(search, u, opts);
    if (detail) *detail = est;
    return len * len * est.psi;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Unreachable) return kInf;
    throw;
  }
}

PeriodicGraph tube_graph(const PeriodicConstraint& phi, double z, double c, int resolution) {
  if (phi.dim() != 2) fail(ErrorCode::UnsupportedKind, "tube graphs are built for m = 2");
  if (resolution < 32) fail(ErrorCode::InvalidArgument, "tube resolution must be at least 32");
  if (!(c > 0.0)) fail(ErrorCode::InvalidArgument, "tube half-width must be positive");
  int n = resolution;
  double h = 1.0 / n;
  std::vector<int> id(static_cast<std::size_t>(n) * n, -1);
  PeriodicGraph g;
  g.dim = 2;
  g.level = z;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (std::abs(phi.value(vec2(i * h, j * h)) - z) <= c) {
        id[static_cast<std::size_t>(j) * n + i] = g.num_vertices();
        g.vertices.push_back(vec2(i * h, j * h));
      }
    }
  }
  const int steps[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      int a = id[static_cast<std::size_t>(j) * n + i];
      if (a < 0) continue;
      for (const auto& s : steps) {
        int ii = i + s[0], jj = j + s[1];
        Shift shift(ii >= n ? 1 : (ii < 0 ? -1 : 0), jj >= n ? 1 : (jj < 0 ? -1 : 0), 0);
        int b = id[static_cast<std::size_t>((jj + n) % n) * n + (ii + n) % n];
        if (b < 0) continue;
        Vec3 pa = g.vertices[a];
        Vec3 pb = g.vertices[b] + shift.cast<double>();
        if (std::abs(phi.value(0.5 * (pa + pb)) - z) > c) continue;
        g.edges.push_back({a, b, shift, (pb - pa).norm(), {pa, pb}});
      }
    }
  }
  return g;
}

double psi_T_zc(const PeriodicConstraint& phi, double z, double c, const Vec3& w, double T, int resolution) {
  PeriodicGraph g = tube_graph(phi, z, c, resolution);
  if (g.num_vertices() == 0) fail(ErrorCode::EmptyAdmissibleSet, "tube is empty");
  return psi_T_z(g, w, T);
}

bool certify_unreachable(const PeriodicGraph& g, const ComponentReport& report, const Ball& a, const Ball& b) {
  int dim = g.dim;
  Adjacency adj = build_adjacency(g);
  for (const auto& comp : report.components) {
    if (comp.translation_rank >= dim) return false;
    // Orthonormal basis of the complement of the lattice span.
    Eigen::MatrixXd span(dim, std::max(comp.translation_rank, 1));
    span.setZero();
    for (int i = 0; i < comp.translation_rank; ++i) span.col(i) = comp.generators[i].cast<double>().head(dim);
    Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(span).householderQ();
    int skip = comp.translation_rank;
    Eigen::MatrixXd perp = q.rightCols(dim - skip);
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim - skip, kInf);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim - skip, -kInf);
    auto add = [&](const Vec3& p) {
      Eigen::VectorXd t = perp.transpose() * p.head(dim);
      lo = lo.cwiseMin(t);
      hi = hi.cwiseMax(t);
    };
    for (std::size_t i = 0; i < comp.vertices.size(); ++i) {
      int v = comp.vertices[i];
      Vec3 base = g.vertices[v] + comp.lift[i].cast<double>();
      add(base);
      for (const Arc* arc = adj.begin(v); arc != adj.end(v); ++arc) {
        if (!arc->forward) continue;
        for (const auto& p : g.edges[arc->edge].polyline) add(p + comp.lift[i].cast<double>());
      }
    }
    double diam = (hi - lo).norm();
    Eigen::VectorXd gap = perp.transpose() * (a.center - b.center).head(dim);
    if (gap.norm() <= diam + a.radius + b.radius + 1e-9) return false;
  }
  return true;
}

}  // namespace oschom
