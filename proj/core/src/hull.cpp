#include "oschom/hull.hpp"

#include "oschom/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace oschom {

namespace {

double cross2(const Vec3& o, const Vec3& a, const Vec3& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

struct Tri {
  std::array<int, 3> v;
  Vec3 n;
  double d;
};

Tri make_tri(const std::vector<Vec3>& p, int a, int b, int c) {
  Vec3 n = (p[b] - p[a]).cross(p[c] - p[a]);
  double len = n.norm();
  if (len > 0.0) n /= len;
  return {{a, b, c}, n, n.dot(p[a])};
}

std::vector<std::array<int, 3>> hull3(const std::vector<Vec3>& p, double eps) {
  int n = static_cast<int>(p.size());
  // Initial tetrahedron from extreme points.
  int i0 = 0;
  for (int i = 1; i < n; ++i) {
    if (p[i][0] < p[i0][0]) i0 = i;
  }
  int i1 = -1;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    double d = (p[i] - p[i0]).norm();
    if (d > best) best = d, i1 = i;
  }
  int i2 = -1;
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    double d = (p[i] - p[i0]).cross(p[i1] - p[i0]).norm();
    if (d > best) best = d, i2 = i;
  }
  int i3 = -1;
  best = -1.0;
  Vec3 nrm = (p[i1] - p[i0]).cross(p[i2] - p[i0]);
  for (int i = 0; i < n; ++i) {
    double d = std::abs(nrm.dot(p[i] - p[i0]));
    if (d > best) best = d, i3 = i;
  }
  if (best <= eps) fail(ErrorCode::InvalidArgument, "degenerate 3D hull input");
  std::vector<Tri> faces;
  Vec3 centroid = (p[i0] + p[i1] + p[i2] + p[i3]) / 4.0;
  auto add = [&](int a, int b, int c) {
    Tri t = make_tri(p, a, b, c);
    if (t.n.dot(centroid) > t.d) t = make_tri(p, a, c, b);
    faces.push_back(t);
  };
  add(i0, i1, i2);
  add(i0, i1, i3);
  add(i0, i2, i3);
  add(i1, i2, i3);
  for (int i = 0; i < n; ++i) {
    if (i == i0 || i == i1 || i == i2 || i == i3) continue;
    std::vector<char> visible(faces.size(), 0);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (faces[f].n.dot(p[i]) - faces[f].d > eps) visible[f] = 1, any = true;
    }
    if (!any) continue;
    std::map<std::pair<int, int>, int> edges;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      for (int k = 0; k < 3; ++k) edges[{faces[f].v[k], faces[f].v[(k + 1) % 3]}]++;
    }
    std::vector<Tri> next;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) next.push_back(faces[f]);
    }
    for (const auto& [e, cnt] : edges) {
      if (edges.count({e.second, e.first})) continue;
      Tri t = make_tri(p, e.first, e.second, i);
      next.push_back(t);
    }
    faces = std::move(next);
  }
  std::vector<std::array<int, 3>> out;
  for (const auto& f : faces) out.push_back(f.v);
  return out;
}

}  // namespace

std::vector<Vec3> planar_hull(std::vector<Vec3> pts, double tol) {
  std::sort(pts.begin(), pts.end(), [](const Vec3& a, const Vec3& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec3& a, const Vec3& b) { return a[0] == b[0] && a[1] == b[1]; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec3> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], p) <= tol) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    const Vec3& p = pts[i - 1];
    while (k >= t && cross2(h[k - 2], h[k - 1], p) <= tol) --k;
    h[k++] = p;
  }
  h.resize(k - 1);
  return h;
}

bool Polytope::in_span(const Vec3& w, double tol) const {
  double n = w.norm();
  if (n == 0.0) return true;
  if (rank == 0) return false;
  Vec3 proj = basis * (basis.transpose() * w);
  return (w - proj).norm() <= tol * n;
}

double Polytope::gauge(const Vec3& w) const {
  if (w.norm() == 0.0) return 0.0;
  if (!in_span(w)) return kInf;
  double g = 0.0;
  for (const auto& f : facets) g = std::max(g, f.normal.dot(w) / f.offset);
  return g;
}

Polytope convex_hull(const std::vector<Vec3>& points, double tol) {
  Polytope out;
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.norm());
  if (points.empty() || scale == 0.0) {
    out.basis.resize(3, 0);
    return out;
  }
  Eigen::MatrixXd m(3, points.size());
  for (std::size_t i = 0; i < points.size(); ++i) m.col(static_cast<long>(i)) = points[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  auto sv = svd.singularValues();
  int r = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] > 1e-9 * sv[0]) ++r;
  }
  out.rank = r;
  out.basis = svd.matrixU().leftCols(r);
  // In two dimensions keep the canonical xy frame when the points are planar.
  if (r == 2 && std::abs(out.basis.col(0)[2]) < 1e-12 && std::abs(out.basis.col(1)[2]) < 1e-12) {
    out.basis.col(0) = Vec3(1, 0, 0);
    out.basis.col(1) = Vec3(0, 1, 0);
  }
  if (r == 1) {
    Vec3 u = out.basis.col(0);
    double hi = 0.0;
    Vec3 vhi = Vec3::Zero();
    for (const auto& p : points) {
      double t = u.dot(p);
      if (std::abs(t) > hi) hi = std::abs(t), vhi = t >= 0 ? p : Vec3(-p);
    }
    out.vertices = {vhi, -vhi};
    out.facets = {{u, hi}, {-u, hi}};
    return out;
  }
  if (r == 2) {
    Vec3 e0 = out.basis.col(0), e1 = out.basis.col(1);
    std::vector<Vec3> planar;
    for (const auto& p : points) planar.emplace_back(e0.dot(p), e1.dot(p), 0.0);
    std::vector<Vec3> h = planar_hull(planar, tol * scale * scale);
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Vec3& a = h[i];
      const Vec3& b = h[(i + 1) % h.size()];
      Vec3 n2(b[1] - a[1], -(b[0] - a[0]), 0.0);
      n2.normalize();
      Vec3 n = n2[0] * e0 + n2[1] * e1;
      double off = n2.dot(a);
      if (off > 0.0) out.facets.push_back({n, off});
      out.vertices.push_back(a[0] * e0 + a[1] * e1);
    }
    return out;
  }
  std::vector<std::array<int, 3>> tris = hull3(points, 1e-12 * scale);
  std::map<int, int> remap;
  for (auto& t : tris) {
    std::array<int, 3> local{};
    for (int k = 0; k < 3; ++k) {
      auto it = remap.find(t[k]);
      if (it == remap.end()) {
        it = remap.emplace(t[k], static_cast<int>(out.vertices.size())).first;
        out.vertices.push_back(points[t[k]]);
      }
      local[k] = it->second;
    }
    out.triangles.push_back(local);
    Tri f = make_tri(points, t[0], t[1], t[2]);
    if (f.d > 0.0) out.facets.push_back({f.n, f.d});
  }
  return out;
}

}  // namespace oschom
