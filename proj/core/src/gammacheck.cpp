#include "oschom/gammacheck.hpp"

#include "oschom/error.hpp"
#include "oschom/geodesic.hpp"
#include "oschom/levelset.hpp"
#include "oschom/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <memory>
#include <random>
#include <sstream>

namespace oschom {

DiscreteCurve DiscreteCurve::straight(const Vec3& a, const Vec3& b, int K, int dim) {
  DiscreteCurve c;
  c.dim = dim;
  c.nodes.resize(static_cast<std::size_t>(K) + 1);
  for (int i = 0; i <= K; ++i) c.nodes[i] = a + (b - a) * (static_cast<double>(i) / K);
  c.nodes.back() = b;
  return c;
}

DiscreteCurve DiscreteCurve::resampled(int K_new) const {
  if (nodes.empty()) fail(ErrorCode::InvalidArgument, "empty curve");
  DiscreteCurve c;
  c.dim = dim;
  c.nodes.resize(static_cast<std::size_t>(K_new) + 1);
  int K_old = K();
  for (int i = 0; i <= K_new; ++i) {
    double s = static_cast<double>(i) / K_new * K_old;
    int j = std::min(static_cast<int>(std::floor(s)), std::max(K_old - 1, 0));
    double f = K_old == 0 ? 0.0 : s - j;
    c.nodes[i] = K_old == 0 ? nodes[0] : Vec3(nodes[j] * (1.0 - f) + nodes[j + 1] * f);
  }
  c.nodes.front() = nodes.front();
  c.nodes.back() = nodes.back();
  return c;
}

namespace {

void check_scales(double eps, double delta) {
  if (!(eps > 0.0) || !(delta > 0.0)) fail(ErrorCode::InvalidArgument, "eps and delta must be positive");
}

}  // namespace

EnergyTerms energy_terms(const PeriodicConstraint& phi, double eps, double delta, const DiscreteCurve& curve) {
  check_scales(eps, delta);
  EnergyTerms e;
  int K = curve.K();
  if (K < 1) return e;
  double weight = (delta / eps) * (delta / eps);
  bool flat = phi.kind() == ConstraintKind::Zero;
  for (int i = 0; i < K; ++i) {
    Vec3 du = curve.nodes[i + 1] - curve.nodes[i];
    e.dirichlet += K * du.squaredNorm();
    if (flat) continue;
    Vec3 mid = 0.5 * (curve.nodes[i] + curve.nodes[i + 1]) / eps;
    double s = phi.gradient(mid).dot(du);
    e.penalty += weight * K * s * s;
  }
  return e;
}

double energy_F_eps(const PeriodicConstraint& phi, double eps, double delta, const DiscreteCurve& curve) {
  return energy_terms(phi, eps, delta, curve).total();
}

std::vector<Vec3> energy_gradient(const PeriodicConstraint& phi, double eps, double delta,
                                  const DiscreteCurve& curve) {
  check_scales(eps, delta);
  int K = curve.K();
  std::vector<Vec3> grad(curve.nodes.size(), Vec3::Zero());
  if (K < 1) return grad;
  double weight = (delta / eps) * (delta / eps);
  bool flat = phi.kind() == ConstraintKind::Zero;
  for (int i = 0; i < K; ++i) {
    Vec3 du = curve.nodes[i + 1] - curve.nodes[i];
    Vec3 gd = 2.0 * K * du;
    grad[i] -= gd;
    grad[i + 1] += gd;
    if (flat) continue;
    Vec3 mid = 0.5 * (curve.nodes[i] + curve.nodes[i + 1]) / eps;
    Vec3 g = phi.gradient(mid);
    double s = g.dot(du);
    if (s == 0.0) continue;
    // d/du of the midpoint argument is 1 / (2 eps) for both endpoints.
    Vec3 bend = phi.hessian(mid) * du / (2.0 * eps);
    double c = 2.0 * weight * K * s;
    grad[i] += c * (bend - g);
    grad[i + 1] += c * (bend + g);
  }
  grad.front().setZero();
  grad.back().setZero();
  if (curve.dim < 3) {
    for (auto& g : grad) g.z() = 0.0;
  }
  return grad;
}

namespace {

struct DescentRun {
  DiscreteCurve curve;
  double start_energy = kInf;
  double energy = kInf;
  int iterations = 0;
  bool converged = false;
};

DescentRun descend(const PeriodicConstraint& phi, double eps, double delta, DiscreteCurve curve, int max_iterations,
                   double grad_tol_factor) {
  DescentRun run;
  int K = curve.K();
  double E = energy_F_eps(phi, eps, delta, curve);
  run.start_energy = E;
  double step = 0.25 / K;
  DiscreteCurve trial = curve;
  int it = 0;
  for (; it < max_iterations; ++it) {
    std::vector<Vec3> g = energy_gradient(phi, eps, delta, curve);
    double gn2 = 0.0;
    for (const auto& v : g) gn2 += v.squaredNorm();
    if (std::sqrt(gn2) <= grad_tol_factor * K) {
      run.converged = true;
      break;
    }
    bool accepted = false;
    while (step > 1e-30) {
      for (std::size_t i = 0; i < curve.nodes.size(); ++i) trial.nodes[i] = curve.nodes[i] - step * g[i];
      double En = energy_F_eps(phi, eps, delta, trial);
      if (En <= E - 1e-4 * step * gn2) {
        std::swap(curve.nodes, trial.nodes);
        E = En;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No decrease possible at machine precision: a numerical stationary point.
      run.converged = true;
      break;
    }
    step *= 1.5;
  }
  run.iterations = it;
  run.energy = E;
  run.curve = std::move(curve);
  return run;
}

}  // namespace

DescentResult minimize_F_eps(const PeriodicConstraint& phi, double eps, double delta, const Vec3& w, int K,
                             int restarts, const DescentOptions& opts) {
  check_scales(eps, delta);
  if (K < 2) fail(ErrorCode::InvalidArgument, "K must be at least 2");
  if (restarts < 1) fail(ErrorCode::InvalidArgument, "restarts must be at least 1");
  int dim = phi.dim();
  std::vector<DiscreteCurve> starts;
  DiscreteCurve line = DiscreteCurve::straight(Vec3::Zero(), w, K, dim);
  starts.push_back(line);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int r = 1; r < restarts; ++r) {
    DiscreteCurve c = line;
    for (int i = 1; i < K; ++i) {
      for (int d = 0; d < dim; ++d) c.nodes[i][d] += eps * unif(rng);
    }
    starts.push_back(std::move(c));
  }
  for (const auto& ws : opts.warm_starts) {
    DiscreteCurve c = ws.K() == K ? ws : ws.resampled(K);
    c.dim = dim;
    c.nodes.front() = Vec3::Zero();
    c.nodes.back() = w;
    starts.push_back(std::move(c));
  }
  std::vector<DescentRun> runs(starts.size());
  parallel_for(static_cast<int>(starts.size()), opts.threads, [&](int i) {
    runs[i] = descend(phi, eps, delta, starts[i], opts.max_iterations, opts.grad_tol_factor);
  });
  DescentResult out;
  std::size_t best = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    out.start_energies.push_back(runs[i].start_energy);
    out.final_energies.push_back(runs[i].energy);
    if (runs[i].energy < runs[best].energy) best = i;
  }
  out.curve = std::move(runs[best].curve);
  out.energy = runs[best].energy;
  out.initial_energy = runs[best].start_energy;
  out.iterations = runs[best].iterations;
  out.converged = runs[best].converged;
  return out;
}

namespace {

int level_of_vertex(const HomogenizedMetric& metric, const Vec3& v) {
  double best = kInf;
  int level = 0;
  for (std::size_t k = 0; k < metric.directions.size(); ++k) {
    double psi = metric.psi_values[k];
    if (!std::isfinite(psi) || psi <= 0.0) continue;
    double d = (metric.directions[k] / std::sqrt(psi) - v).norm();
    if (d < best) {
      best = d;
      level = metric.psi_level.empty() ? 0 : metric.psi_level[k];
    }
  }
  return level;
}

}  // namespace

std::vector<CaratheodoryPiece> caratheodory_decomposition(const HomogenizedMetric& metric, const Vec3& w) {
  const Polytope& ball = metric.ball;
  std::vector<CaratheodoryPiece> pieces;
  if (w.norm() == 0.0) return pieces;
  if (!std::isfinite(ball.gauge(w))) fail(ErrorCode::DomainViolation, "w is outside the domain of psi_hom");
  const double tol = 1e-10;
  auto add = [&](double coef, const Vec3& v) {
    if (coef > tol) pieces.push_back({coef, v, level_of_vertex(metric, v)});
  };
  if (ball.rank == 1) {
    for (const auto& v : ball.vertices) {
      double c = w.dot(v) / v.squaredNorm();
      if (c > 0.0) {
        add(c, v);
        break;
      }
    }
  } else if (ball.rank == 2) {
    Eigen::Matrix<double, 3, 2> B = ball.basis.leftCols(2);
    Eigen::Vector2d p = B.transpose() * w;
    std::size_t n = ball.vertices.size();
    for (std::size_t j = 0; j < n && pieces.empty(); ++j) {
      const Vec3& a = ball.vertices[j];
      const Vec3& b = ball.vertices[(j + 1) % n];
      Eigen::Matrix2d M;
      M.col(0) = B.transpose() * a;
      M.col(1) = B.transpose() * b;
      if (std::abs(M.determinant()) < 1e-14) continue;
      Eigen::Vector2d c = M.partialPivLu().solve(p);
      if (c.minCoeff() < -1e-12) continue;
      add(c(0), a);
      add(c(1), b);
    }
  } else {
    for (const auto& t : ball.triangles) {
      Mat3 M;
      for (int i = 0; i < 3; ++i) M.col(i) = ball.vertices[t[i]];
      if (std::abs(M.determinant()) < 1e-14) continue;
      Vec3 c = M.partialPivLu().solve(w);
      if (c.minCoeff() < -1e-12) continue;
      for (int i = 0; i < 3; ++i) add(c(i), ball.vertices[t[i]]);
      break;
    }
  }
  if (pieces.empty()) fail(ErrorCode::DomainViolation, "no facet of the metric ball contains w");
  // Coefficients c_i on ball vertices b_i sum to the gauge g; the pieces are
  // lambda_i = c_i / g with targets w_i = g b_i, so psi(w_i) = g^2.
  double g = 0.0;
  for (const auto& p : pieces) g += p.weight;
  for (auto& p : pieces) {
    p.weight /= g;
    p.target *= g;
  }
  return pieces;
}

std::vector<PeriodicGraph> metric_level_graphs(const PeriodicConstraint& phi, const HomogenizedMetric& metric) {
  if (phi.dim() == 3) return exact_level_graphs(phi);
  if (phi.kind() == ConstraintKind::Zero) return {};
  int res = metric.resolution > 0 ? metric.resolution : 128;
  std::vector<PeriodicGraph> out;
  for (const auto& l : metric.directional_samples) out.push_back(extract_level_graph(phi, l.level, res));
  return out;
}

namespace {

struct LevelWalker {
  const PeriodicGraph* graph = nullptr;
  std::unique_ptr<LiftedGraphSearch> search;
  Eigen::MatrixXd generators;  // dim x rank
  LiftedVertex anchor;         // lifted vertex nearest the origin
  int dim = 2;

  // Nearest vector of the component's translation lattice.
  Vec3 round_to_lattice(const Vec3& x) const {
    Eigen::VectorXd xs = x.head(dim);
    Eigen::VectorXd c = generators.colPivHouseholderQr().solve(xs);
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = std::round(c(i));
    Vec3 out = Vec3::Zero();
    out.head(dim) = generators * c;
    return out;
  }

  LiftedVertex anchor_near(const Vec3& x) const {
    Vec3 shift = round_to_lattice(x);
    LiftedVertex v = anchor;
    for (int d = 0; d < dim; ++d) v.cell(d) += static_cast<int>(std::lround(shift(d)));
    return v;
  }
};

LevelWalker make_walker(const PeriodicGraph& g) {
  LevelWalker lw;
  lw.graph = &g;
  lw.dim = g.dim;
  lw.search = std::make_unique<LiftedGraphSearch>(g);
  ComponentReport rep = classify_components(g);
  const Component* comp = nullptr;
  for (const auto& c : rep.components) {
    if (!comp || c.translation_rank > comp->translation_rank) comp = &c;
  }
  if (!comp || !comp->unbounded()) fail(ErrorCode::NoUnboundedComponent, "level has no unbounded component");
  lw.generators.resize(g.dim, comp->translation_rank);
  for (int j = 0; j < comp->translation_rank; ++j) {
    for (int d = 0; d < g.dim; ++d) lw.generators(d, j) = comp->generators[j](d);
  }
  double best = kInf;
  for (std::size_t i = 0; i < comp->vertices.size(); ++i) {
    int v = comp->vertices[i];
    Vec3 p = g.vertices[v] + comp->lift[i].cast<double>();
    Vec3 s = lw.round_to_lattice(-p);
    double d = (p + s).norm();
    if (d < best - 1e-12) {
      best = d;
      lw.anchor.vertex = v;
      lw.anchor.cell = comp->lift[i];
      for (int k = 0; k < g.dim; ++k) lw.anchor.cell(k) += static_cast<int>(std::lround(s(k)));
    }
  }
  return lw;
}

struct TimedPiece {
  std::vector<Vec3> polyline;
  double duration = 0.0;
  bool junction = false;
};

}  // namespace

DiscreteCurve build_recovery_sequence(const std::vector<PeriodicGraph>& level_graphs, const HomogenizedMetric& metric,
                                      const Vec3& w, double eps, double delta, const RecoveryOptions& opts) {
  check_scales(eps, delta);
  int dim = metric.dim;
  double psi = metric.query(w);
  if (!std::isfinite(psi)) fail(ErrorCode::DomainViolation, "psi_hom(w) is infinite");
  if (w.norm() == 0.0 || level_graphs.empty()) {
    int K = std::max(opts.min_nodes, 2);
    return DiscreteCurve::straight(Vec3::Zero(), w, K, dim);
  }
  std::vector<CaratheodoryPiece> pieces = caratheodory_decomposition(metric, w);

  const double S = 1.0 / eps;                          // micro time horizon
  const double T = std::cbrt(delta) / eps;             // block length
  const double K_time = std::pow(delta, 2.0 / 3.0) / eps;  // junction time
  int blocks = std::max(1, static_cast<int>(std::lround(S / T)));
  double T_eff = S / blocks;

  std::map<int, LevelWalker> walkers;
  auto walker = [&](int level) -> LevelWalker& {
    auto it = walkers.find(level);
    if (it == walkers.end()) {
      if (level < 0 || level >= static_cast<int>(level_graphs.size())) {
        fail(ErrorCode::InvalidArgument, "metric level without a matching graph");
      }
      it = walkers.emplace(level, make_walker(level_graphs[level])).first;
    }
    return it->second;
  };

  std::vector<TimedPiece> timeline;
  Vec3 cur_pos = Vec3::Zero();
  int cur_level = -1;
  LiftedVertex cur;
  auto junction_to = [&](const Vec3& p) {
    if ((p - cur_pos).norm() > 1e-12) timeline.push_back({{cur_pos, p}, 0.0, true});
    cur_pos = p;
  };

  Vec3 ideal = Vec3::Zero();
  for (int b = 0; b < blocks; ++b) {
    for (const auto& piece : pieces) {
      LevelWalker& lw = walker(piece.level);
      if (piece.level != cur_level) {
        cur = lw.anchor_near(cur_level < 0 ? Vec3::Zero() : ideal);
        junction_to(lw.search->position(cur));
        cur_level = piece.level;
      }
      ideal += piece.weight * T_eff * piece.target;
      bool last = b == blocks - 1 && &piece == &pieces.back();
      Vec3 goal = last ? Vec3(w / eps) : ideal;
      LiftedVertex next = lw.anchor_near(goal);
      Vec3 next_pos = lw.search->position(next);
      TimedPiece tp;
      tp.duration = piece.weight * T_eff;
      if ((next_pos - cur_pos).norm() > 1e-12) {
        SearchOptions so;
        PathResult pr = lw.search->path({cur}, Ball{next_pos, 1e-9}, so);
        if (!std::isfinite(pr.length)) fail(ErrorCode::Unreachable, "recovery piece endpoints are not connected");
        tp.polyline = pr.polyline;
      } else {
        tp.polyline = {cur_pos, cur_pos};
      }
      timeline.push_back(std::move(tp));
      cur = next;
      cur_pos = next_pos;
    }
  }
  junction_to(w / eps);

  int junctions = 0;
  for (const auto& tp : timeline) junctions += tp.junction ? 1 : 0;
  // K_time is only small against T asymptotically; at coarse eps each
  // junction is capped at 5% of the horizon.
  double jt = std::min(K_time, 0.05 * S);
  double piece_time = 0.0;
  for (const auto& tp : timeline) piece_time += tp.junction ? 0.0 : tp.duration;
  double scale = (S - jt * junctions) / piece_time;
  double total_len = 0.0;
  for (auto& tp : timeline) {
    tp.duration = tp.junction ? jt : tp.duration * scale;
    total_len += polyline_length(tp.polyline);
  }

  int K = static_cast<int>(std::ceil(opts.nodes_per_unit_length * total_len));
  K = std::clamp(K, opts.min_nodes, opts.max_nodes);
  DiscreteCurve curve;
  curve.dim = dim;
  curve.nodes.resize(static_cast<std::size_t>(K) + 1);
  std::size_t seg = 0;
  double seg_start = 0.0;
  for (int i = 0; i <= K; ++i) {
    double tau = S * i / K;
    while (seg + 1 < timeline.size() && tau > seg_start + timeline[seg].duration) {
      seg_start += timeline[seg].duration;
      ++seg;
    }
    const TimedPiece& tp = timeline[seg];
    double frac = tp.duration > 0.0 ? std::clamp((tau - seg_start) / tp.duration, 0.0, 1.0) : 1.0;
    double target = frac * polyline_length(tp.polyline);
    Vec3 p = tp.polyline.back();
    double acc = 0.0;
    for (std::size_t j = 1; j < tp.polyline.size(); ++j) {
      double l = (tp.polyline[j] - tp.polyline[j - 1]).norm();
      if (acc + l >= target) {
        double f = l > 0.0 ? (target - acc) / l : 0.0;
        p = tp.polyline[j - 1] + f * (tp.polyline[j] - tp.polyline[j - 1]);
        break;
      }
      acc += l;
    }
    curve.nodes[i] = eps * p;
  }
  curve.nodes.front() = Vec3::Zero();
  curve.nodes.back() = w;
  return curve;
}

DiscreteCurve build_recovery_sequence(const PeriodicConstraint& phi, const HomogenizedMetric& metric, const Vec3& w,
                                      double eps, double delta, const RecoveryOptions& opts) {
  return build_recovery_sequence(metric_level_graphs(phi, metric), metric, w, eps, delta, opts);
}

double max_deviation_from_affine(const DiscreteCurve& curve, const Vec3& w) {
  double worst = 0.0;
  int K = curve.K();
  for (int i = 0; i <= K; ++i) {
    double t = K == 0 ? 0.0 : static_cast<double>(i) / K;
    worst = std::max(worst, (curve.nodes[i] - t * w).norm());
  }
  return worst;
}

std::string TrendTable::to_csv() const {
  std::ostringstream os;
  os << "eps,delta,recovery_energy,descent_energy,psi_hom\n";
  os << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.eps << ',' << r.delta << ',' << r.recovery_energy << ',' << r.descent_energy << ',' << r.psi_hom << '\n';
  }
  return os.str();
}

TrendTable gamma_trend(const PeriodicConstraint& phi, const HomogenizedMetric& metric, const Vec3& w,
                       const std::vector<double>& eps_list, double alpha, const TrendOptions& opts) {
  if (eps_list.empty()) fail(ErrorCode::InvalidArgument, "empty eps list");
  if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "delta exponent must be positive");
  std::vector<double> eps_sorted = eps_list;
  std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<>());
  std::vector<PeriodicGraph> graphs = metric_level_graphs(phi, metric);
  TrendTable table;
  table.rows.resize(eps_sorted.size());
  double psi = metric.query(w);
  parallel_for(static_cast<int>(eps_sorted.size()), opts.threads, [&](int i) {
    TrendRow& row = table.rows[i];
    row.eps = eps_sorted[i];
    row.delta = std::pow(row.eps, alpha);
    row.psi_hom = psi;
    DiscreteCurve rec = build_recovery_sequence(graphs, metric, w, row.eps, row.delta, opts.recovery);
    row.recovery_energy = energy_F_eps(phi, row.eps, row.delta, rec);
    row.recovery_deviation = max_deviation_from_affine(rec, w);
    int K = opts.descent_nodes > 0 ? opts.descent_nodes : rec.K();
    DescentOptions d;
    d.max_iterations = opts.max_iterations;
    d.seed = opts.seed + static_cast<std::uint64_t>(i);
    if (opts.warm_start) d.warm_starts.push_back(rec);
    DescentResult res = minimize_F_eps(phi, row.eps, row.delta, w, K, opts.restarts, d);
    row.descent_energy = res.energy;
    row.descent_converged = res.converged;
  });
  double floor = w.squaredNorm() - 1e-3;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].descent_energy < floor) table.descent_above_floor = false;
    if (i > 0 && table.rows[i].recovery_energy > table.rows[i - 1].recovery_energy * 1.02) {
      table.recovery_nonincreasing = false;
    }
  }
  return table;
}

}  // namespace oschom
