#include "oschom/metric.hpp"

#include "oschom/error.hpp"
#include "oschom/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oschom {

std::string_view to_string(LevelStatus s) {
  switch (s) {
    case LevelStatus::UniqueUnbounded: return "unique-unbounded";
    case LevelStatus::DegenerateFamily: return "degenerate-family";
    case LevelStatus::Conjectural: return "formula-conjectural";
  }
  return "unknown";
}

namespace {

LevelStatus level_status(const ComponentReport& rep) {
  if (rep.num_unbounded <= 1) return LevelStatus::UniqueUnbounded;
  std::optional<Shift> line;
  for (const auto& c : rep.components) {
    if (!c.unbounded()) continue;
    if (c.translation_rank != 1) return LevelStatus::Conjectural;
    if (!line) {
      line = c.generators.front();
    } else if (c.generators.front() != *line && c.generators.front() != Shift(-*line)) {
      return LevelStatus::Conjectural;
    }
  }
  return LevelStatus::DegenerateFamily;
}

int default_directions(int dim, int requested) {
  if (requested > 0) return requested;
  return dim == 3 ? 200 : 64;
}

LevelSamples sample_level(const PeriodicGraph& g, const ComponentReport& rep, const std::vector<Vec3>& dirs,
                          const MetricOptions& opts) {
  LevelSamples ls;
  ls.level = g.level.value_or(0.0);
  ls.status = level_status(rep);
  ls.num_unbounded = rep.num_unbounded;
  ls.samples.resize(dirs.size());
  LiftedGraphSearch search(g);
  std::size_t half = dirs.size() / 2;
  parallel_for(static_cast<int>(half), opts.threads, [&](int k) {
    StableNormEstimate est;
    double psi = psi_hom_z(search, rep, dirs[k], opts.stable, &est);
    DirectionalMetricSample s;
    s.direction = dirs[k];
    s.level = ls.level;
    s.psi_hom_value = psi;
    s.error_bound = est.error_bound;
    for (std::size_t i = 0; i < est.schedule.size() && i < est.psi_T.size(); ++i) {
      s.psi_T_values.emplace_back(est.schedule[i], est.psi_T[i]);
    }
    ls.samples[k] = s;
    DirectionalMetricSample m = s;
    m.direction = dirs[k + half];
    ls.samples[k + half] = m;
  });
  return ls;
}

}  // namespace

double HomogenizedMetric::query(const Vec3& w) const {
  double g = ball.gauge(w);
  return std::isfinite(g) ? g * g : kInf;
}

double HomogenizedMetric::raw_min(const Vec3& w) const {
  double n = w.norm();
  if (n == 0.0) return 0.0;
  Vec3 u = w / n;
  std::size_t best = 0;
  for (std::size_t k = 1; k < directions.size(); ++k) {
    if (directions[k].dot(u) > directions[best].dot(u)) best = k;
  }
  return psi_values[best] * n * n;
}

std::vector<Vec3> direction_grid(int dim, int count) {
  if (count < 2 || count % 2 != 0) fail(ErrorCode::InvalidArgument, "direction count must be even and >= 2");
  std::vector<Vec3> half;
  int h = count / 2;
  if (dim == 2) {
    for (int k = 0; k < h; ++k) {
      double a = std::numbers::pi * k / h;
      Vec3 d(std::cos(a), std::sin(a), 0.0);
      for (int i = 0; i < 2; ++i) {
        if (std::abs(d[i]) < 1e-15) d[i] = 0.0;
      }
      if (k * 2 == h) d = Vec3(0.0, 1.0, 0.0);
      half.push_back(d);
    }
  } else {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < h; ++k) {
      double z = 1.0 - (2.0 * k + 1.0) / h;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vec3 d(r * std::cos(golden * k), r * std::sin(golden * k), z);
      half.push_back(sign_normalized(d));
    }
  }
  std::vector<Vec3> out = half;
  for (const auto& d : half) out.push_back(-d);
  return out;
}

std::vector<double> scan_level_candidates(const PeriodicConstraint& phi, int resolution, int scan_levels) {
  Interval range = image_range(phi, resolution);
  double width = range.hi - range.lo;
  std::vector<double> out;
  if (width <= 0.0) return {range.lo};
  for (int k = 0; k < scan_levels; ++k) out.push_back(range.lo + width * (k + 0.5) / scan_levels);
  if (phi.dim() == 2) {
    int n = resolution;
    double h = 1.0 / n;
    const int ring[8][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
    std::vector<double> saddles;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        double c = phi.value(vec2(i * h, j * h));
        int changes = 0;
        int first = 0, prev = 0;
        for (int r = 0; r < 8; ++r) {
          double v = phi.value(vec2((i + ring[r][0]) * h, (j + ring[r][1]) * h)) - c;
          int s = v > 1e-14 * width ? 1 : (v < -1e-14 * width ? -1 : 0);
          if (s == 0) continue;
          if (prev != 0 && s != prev) ++changes;
          if (first == 0) first = s;
          prev = s;
        }
        if (first != 0 && prev != first) ++changes;
        if (changes >= 4) saddles.push_back(c);
      }
    }
    std::sort(saddles.begin(), saddles.end());
    for (double s : saddles) {
      if (out.size() >= static_cast<std::size_t>(scan_levels) + 64) break;
      bool dup = std::any_of(out.begin() + scan_levels, out.end(),
                             [&](double x) { return std::abs(x - s) <= 1e-9 * width; });
      if (!dup) out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PeriodicGraph> exact_level_graphs(const PeriodicConstraint& phi) {
  switch (phi.kind()) {
    case ConstraintKind::FaceNetwork3D: return {exact_network_graph(NetworkKind::FaceNetwork3D)};
    case ConstraintKind::DistToLattice3D: {
      PeriodicGraph g = exact_network_graph(NetworkKind::SphereNetwork3D);
      g.notes.push_back("single level only: the metric is an upper bound");
      return {g};
    }
    default: break;
  }
  fail(ErrorCode::UnsupportedKind, "no exact level constructor for constraint '" + std::string(phi.id()) + "'");
}

HomogenizedMetric metric_from_samples(int dim, std::vector<LevelSamples> levels) {
  HomogenizedMetric m;
  m.dim = dim;
  if (levels.empty()) fail(ErrorCode::NoAdmissibleLevel, "no level samples");
  std::size_t nd = levels.front().samples.size();
  for (const auto& l : levels) {
    if (l.samples.size() != nd) fail(ErrorCode::InvalidArgument, "levels sampled on different direction grids");
    m.levels_used.push_back(l.level);
    if (l.status == LevelStatus::Conjectural) m.labels.emplace_back("formula conjectural");
    if (l.status == LevelStatus::DegenerateFamily) m.labels.emplace_back("degenerate family");
  }
  std::sort(m.labels.begin(), m.labels.end());
  m.labels.erase(std::unique(m.labels.begin(), m.labels.end()), m.labels.end());
  std::vector<Vec3> points;
  for (std::size_t k = 0; k < nd; ++k) {
    Vec3 d = levels.front().samples[k].direction;
    double best = kInf;
    int arg = 0;
    for (std::size_t li = 0; li < levels.size(); ++li) {
      if (levels[li].samples[k].psi_hom_value < best) {
        best = levels[li].samples[k].psi_hom_value;
        arg = static_cast<int>(li);
      }
    }
    m.directions.push_back(d);
    m.psi_values.push_back(best);
    m.psi_level.push_back(arg);
    if (std::isfinite(best) && best > 0.0) points.push_back(d / std::sqrt(best));
  }
  m.ball = convex_hull(points);
  m.ball_vertices = m.ball.vertices;
  if (m.ball.rank == 1) m.degenerate_subspace = Vec3(m.ball.basis.col(0));
  m.directional_samples = std::move(levels);
  return m;
}

HomogenizedMetric assemble_metric_from_graphs(const std::vector<PeriodicGraph>& graphs, const MetricOptions& opts) {
  if (graphs.empty()) fail(ErrorCode::NoAdmissibleLevel, "no level graphs");
  int dim = graphs.front().dim;
  std::vector<Vec3> dirs = direction_grid(dim, default_directions(dim, opts.directions));
  std::vector<std::pair<const PeriodicGraph*, ComponentReport>> unique, multi;
  for (const auto& g : graphs) {
    ComponentReport rep = classify_components(g);
    if (rep.num_unbounded == 1) {
      unique.emplace_back(&g, std::move(rep));
    } else if (rep.num_unbounded > 1) {
      multi.emplace_back(&g, std::move(rep));
    }
  }
  auto& chosen = unique.empty() ? multi : unique;
  if (chosen.empty()) fail(ErrorCode::NoAdmissibleLevel, "no candidate level has an unbounded component");
  std::vector<LevelSamples> levels;
  for (const auto& [g, rep] : chosen) levels.push_back(sample_level(*g, rep, dirs, opts));
  HomogenizedMetric m = metric_from_samples(dim, std::move(levels));
  for (const auto& [g, rep] : chosen) {
    for (const auto& note : g->notes) {
      if (note.find("upper bound") != std::string::npos) m.labels.push_back(note);
    }
  }
  return m;
}

HomogenizedMetric assemble_metric(const PeriodicConstraint& phi, const std::vector<double>& level_candidates,
                                  const MetricOptions& opts) {
  int dim = phi.dim();
  if (phi.kind() == ConstraintKind::Zero) {
    std::vector<Vec3> dirs = direction_grid(dim, default_directions(dim, opts.directions));
    LevelSamples ls;
    for (const auto& d : dirs) {
      DirectionalMetricSample s;
      s.direction = d;
      s.psi_hom_value = d.squaredNorm();
      ls.samples.push_back(s);
    }
    HomogenizedMetric m = metric_from_samples(dim, {ls});
    m.labels.emplace_back("unconstrained");
    return m;
  }
  if (dim == 3) return assemble_metric_from_graphs(exact_level_graphs(phi), opts);
  std::vector<double> cands = level_candidates;
  if (cands.empty()) cands = scan_level_candidates(phi, opts.resolution, opts.scan_levels);
  std::vector<PeriodicGraph> graphs;
  for (double z : cands) {
    try {
      graphs.push_back(extract_level_graph(phi, z, opts.resolution, opts.level_graph));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::LevelOutOfRange) throw;
    }
  }
  // Keep only levels with unbounded components before sampling.
  std::vector<PeriodicGraph> kept;
  bool have_unique = false;
  std::vector<int> counts;
  for (auto& g : graphs) counts.push_back(classify_components(g).num_unbounded);
  for (int c : counts) have_unique = have_unique || c == 1;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (counts[i] == 1 || (!have_unique && counts[i] > 1)) kept.push_back(std::move(graphs[i]));
  }
  if (kept.empty()) fail(ErrorCode::NoAdmissibleLevel, "no candidate level has an unbounded component");
  HomogenizedMetric m = assemble_metric_from_graphs(kept, opts);
  m.resolution = opts.resolution;
  return m;
}

double query_metric(const HomogenizedMetric& metric, const Vec3& w) { return metric.query(w); }

BallRecord export_ball(const HomogenizedMetric& metric) {
  BallRecord r;
  r.dim = metric.dim;
  r.vertices = metric.ball.vertices;
  r.triangles = metric.ball.triangles;
  r.degenerate_subspace = metric.degenerate_subspace;
  return r;
}

}  // namespace oschom
