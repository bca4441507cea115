#include "oschom/error.hpp"
#include "oschom/levelset.hpp"
#include "oschom/synthesis.hpp"

#include <cmath>
#include <numbers>

namespace oschom {

namespace {

PeriodicGraph grid_lattice() {
  PeriodicGraph g;
  g.dim = 2;
  g.vertices.push_back(Vec3::Zero());
  g.edges.push_back({0, 0, Shift(1, 0, 0), 1.0, {Vec3::Zero(), vec2(1.0, 0.0)}});
  g.edges.push_back({0, 0, Shift(0, 1, 0), 1.0, {Vec3::Zero(), vec2(0.0, 1.0)}});
  return g;
}

// Union of the coordinate planes. Crossing points sit on the axis lines at the
// given pitch; inside each unit face every pair of boundary points on
// different sides is joined by its straight segment, so paths inside a face
// are exact up to the placement of crossing points.
PeriodicGraph face_network(double pitch) {
  int p = static_cast<int>(std::lround(1.0 / pitch));
  if (p < 1 || std::abs(p * pitch - 1.0) > 1e-9) {
    fail(ErrorCode::InvalidArgument, "face network pitch must be 1/p for an integer p");
  }
  GraphBuilder b(3, 1e-9);
  double h = 1.0 / p;
  for (int axis = 0; axis < 3; ++axis) {
    for (int k = 0; k < p; ++k) {
      Vec3 a = Vec3::Zero(), c = Vec3::Zero();
      a[axis] = k * h;
      c[axis] = (k + 1) * h;
      b.add_segment(a, c);
    }
  }
  for (int normal = 0; normal < 3; ++normal) {
    int u = (normal + 1) % 3, v = (normal + 2) % 3;
    // Four sides of the unit square spanned by axes u and v.
    std::vector<std::vector<Vec3>> sides(4);
    for (int k = 0; k <= p; ++k) {
      Vec3 s0 = Vec3::Zero(), s1 = Vec3::Zero(), s2 = Vec3::Zero(), s3 = Vec3::Zero();
      s0[u] = k * h;
      s1[u] = 1.0;
      s1[v] = k * h;
      s2[u] = k * h;
      s2[v] = 1.0;
      s3[v] = k * h;
      sides[0].push_back(s0);
      sides[1].push_back(s1);
      sides[2].push_back(s2);
      sides[3].push_back(s3);
    }
    for (int s = 0; s < 4; ++s) {
      for (int t = s + 1; t < 4; ++t) {
        for (const auto& a : sides[s]) {
          for (const auto& c : sides[t]) {
            if ((a - c).norm() < 1e-12) continue;
            // Skip pairs that share a side (both on a common boundary line).
            bool along_side = false;
            for (int q = 0; q < 4 && !along_side; ++q) {
              bool ina = false, inc = false;
              for (const auto& x : sides[q]) {
                if ((x - a).norm() < 1e-12) ina = true;
                if ((x - c).norm() < 1e-12) inc = true;
              }
              along_side = ina && inc;
            }
            if (!along_side) b.add_segment(a, c);
          }
        }
      }
    }
  }
  PeriodicGraph g = dedupe_edges(b.take(), 1e-12);
  g.is_surface_mesh = true;
  g.level = 0.0;
  g.notes.push_back("coordinate planes; straight face segments between crossing points at pitch 1/" +
                    std::to_string(p));
  return g;
}

Vec3 arc_point(const Vec3& a, const Vec3& c, double t, double radius) {
  Vec3 x = (1.0 - t) * a + t * c;
  return radius * x.normalized();
}

std::vector<Vec3> great_arc(const Vec3& a, const Vec3& c, double radius, int samples, const Vec3& center) {
  std::vector<Vec3> pts;
  Vec3 ua = a.normalized(), uc = c.normalized();
  double ang = std::acos(std::clamp(ua.dot(uc), -1.0, 1.0));
  Vec3 perp = (uc - ua.dot(uc) * ua);
  if (perp.norm() < 1e-12) {
    Vec3 any = std::abs(ua[0]) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    perp = any - any.dot(ua) * ua;
  }
  perp.normalize();
  for (int i = 0; i <= samples; ++i) {
    double t = ang * i / samples;
    pts.push_back(center + radius * (std::cos(t) * ua + std::sin(t) * perp));
  }
  return pts;
}

// Sphere of radius 1/2 around every lattice point (neighbours touch at the
// face centres of the cube). Cube-sphere mesh with great-circle edge lengths,
// plus the great-circle arcs joining the six touch points directly.
PeriodicGraph sphere_network(int subdivisions) {
  int n = subdivisions;
  if (n != 0 && (n < 2 || n % 2 != 0)) {
    fail(ErrorCode::InvalidArgument, "sphere subdivisions must be 0 or even and >= 2");
  }
  const double r = 0.5;
  GraphBuilder b(3, 1e-9);
  auto add_arc = [&](const Vec3& a, const Vec3& c) {
    double ang = std::acos(std::clamp(a.normalized().dot(c.normalized()), -1.0, 1.0));
    if (ang < 1e-12) return;
    b.add_edge(great_arc(a, c, r, 4, Vec3::Zero()), r * ang);
  };
  for (int axis = 0; axis < 3 && n > 0; ++axis) {
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      int u = (axis + 1) % 3, v = (axis + 2) % 3;
      auto pt = [&](int i, int j) {
        Vec3 q = Vec3::Zero();
        q[axis] = sgn;
        q[u] = -1.0 + 2.0 * i / n;
        q[v] = -1.0 + 2.0 * j / n;
        return arc_point(q, q, 0.0, r);
      };
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
          if (i < n) add_arc(pt(i, j), pt(i + 1, j));
          if (j < n) add_arc(pt(i, j), pt(i, j + 1));
          if (i < n && j < n) {
            add_arc(pt(i, j), pt(i + 1, j + 1));
            add_arc(pt(i + 1, j), pt(i, j + 1));
          }
        }
      }
    }
  }
  std::vector<Vec3> touch;
  for (int axis = 0; axis < 3; ++axis) {
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      Vec3 t = Vec3::Zero();
      t[axis] = sgn * r;
      touch.push_back(t);
    }
  }
  for (std::size_t i = 0; i < touch.size(); ++i) {
    for (std::size_t j = i + 1; j < touch.size(); ++j) add_arc(touch[i], touch[j]);
  }
  PeriodicGraph g = dedupe_edges(b.take(), 1e-9);
  g.is_surface_mesh = true;
  g.level = 0.25;
  g.notes.push_back("spheres of radius 1/2 around Z^3 (level 1/4 of the squared distance)");
  return g;
}

}  // namespace

PeriodicGraph exact_network_graph(NetworkKind kind, const NetworkParams& params) {
  switch (kind) {
    case NetworkKind::GridLattice2D: return grid_lattice();
    case NetworkKind::FaceNetwork3D: return face_network(params.pitch);
    case NetworkKind::SphereNetwork3D: return sphere_network(params.sphere_subdivisions);
    case NetworkKind::SynthNetwork:
      if (!params.spec) fail(ErrorCode::InvalidArgument, "SynthNetwork needs a ball spec");
      return build_network(*params.spec, params.wiggle);
  }
  fail(ErrorCode::UnsupportedKind, "unknown network kind");
}

}  // namespace oschom
