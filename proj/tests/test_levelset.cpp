#include "oschom/levelset.hpp"
#include "oschom/synthesis.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace oschom;

namespace {

PeriodicGraph relabeled(const PeriodicGraph& g, const std::vector<int>& perm) {
  PeriodicGraph h = g;
  for (int v = 0; v < g.num_vertices(); ++v) h.vertices[perm[v]] = g.vertices[v];
  for (auto& e : h.edges) {
    e.tail = perm[e.tail];
    e.head = perm[e.head];
  }
  return h;
}

PeriodicGraph translated(const PeriodicGraph& g, const Vec3& c) {
  PeriodicGraph h = g;
  std::vector<Shift> cell(g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v) h.vertices[v] = wrap_unit(g.vertices[v] + c, g.dim, &cell[v]);
  for (auto& e : h.edges) {
    e.shift = e.shift + cell[e.head] - cell[e.tail];
    for (auto& p : e.polyline) p += c - cell[e.tail].cast<double>();
  }
  return h;
}

std::vector<int> sorted_ranks(const ComponentReport& r) {
  std::vector<int> out;
  for (const auto& c : r.components) out.push_back(c.translation_rank);
  std::sort(out.begin(), out.end());
  return out;
}

void check_edge_geometry(const PeriodicGraph& g) {
  for (const auto& e : g.edges) {
    REQUIRE(e.polyline.size() >= 2);
    CHECK((e.polyline.front() - g.vertices[e.tail]).norm() < 1e-9);
    CHECK((e.polyline.back() - g.vertices[e.head] - e.shift.cast<double>()).norm() < 1e-9);
    CHECK(e.length == doctest::Approx(polyline_length(e.polyline)).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("unit grid network") {
  auto g = exact_network_graph(NetworkKind::GridLattice2D);
  CHECK(g.num_vertices() == 1);
  CHECK(g.num_edges() == 2);
  CHECK(g.vertices[0].norm() == 0.0);
  for (const auto& e : g.edges) CHECK(e.length == 1.0);
  auto r = classify_components(g);
  REQUIRE(r.components.size() == 1);
  CHECK(r.components[0].translation_rank == 2);
  CHECK(r.num_unbounded == 1);
  CHECK(r.satisfies_non_degenerate);
}

TEST_CASE("sin-product zero level is the unit grid up to translation") {
  auto phi = PeriodicConstraint::sin_product();
  auto g = extract_level_graph(phi, 0.0, 64);
  check_edge_geometry(g);
  auto r = classify_components(g);
  REQUIRE(r.components.size() == 1);
  CHECK(r.components[0].translation_rank == 2);
  // Lines x = k/2 and y = k/2: length 4 per unit cell.
  CHECK(oracle::total_length(g) == doctest::Approx(4.0).epsilon(1e-2));
  for (const auto& v : g.vertices) {
    double fx = std::abs(v(0) * 2 - std::round(v(0) * 2));
    double fy = std::abs(v(1) * 2 - std::round(v(1) * 2));
    CHECK(std::min(fx, fy) < 1e-9);
  }
}

TEST_CASE("sin-product positive level has only closed loops") {
  auto g = extract_level_graph(PeriodicConstraint::sin_product(), 0.5, 64);
  auto r = classify_components(g);
  CHECK(r.components.size() >= 2);
  CHECK(r.num_unbounded == 0);
  for (const auto& c : r.components) CHECK(c.translation_rank == 0);
  CHECK_FALSE(r.satisfies_non_degenerate);
}

TEST_CASE("dist-z2 half level is the circle of radius one half") {
  auto g = extract_level_graph(PeriodicConstraint::dist_to_lattice_2d(), 0.5, 128);
  // Quadrature of the four quarter arcs clipped to the cell.
  double arc = 4 * oracle::simpson([](double t) { (void)t; return 0.5; }, 0.0, M_PI / 2, 64);
  CHECK(oracle::total_length(g) == doctest::Approx(arc).epsilon(2e-2));
  auto r = classify_components(g);
  CHECK(r.num_unbounded == 1);
  CHECK(r.components.size() == 1);
  CHECK(r.components[0].translation_rank == 2);
}

TEST_CASE("level length converges under refinement") {
  struct Case {
    PeriodicConstraint phi;
    double z;
  };
  std::vector<Case> cases = {{PeriodicConstraint::sin_product(), 0.0},
                             {PeriodicConstraint::sin_product(), 0.5},
                             {PeriodicConstraint::dist_to_lattice_2d(), 0.3},
                             {PeriodicConstraint::sheared_sine(ShearProfile::Sine, 0.2), 0.1}};
  for (const auto& c : cases) {
    double a = oracle::total_length(extract_level_graph(c.phi, c.z, 64));
    double b = oracle::total_length(extract_level_graph(c.phi, c.z, 128));
    CHECK(std::abs(a - b) <= 0.05 * b);
  }
}

TEST_CASE("sheared-sine levels are vertical curves") {
  auto phi = PeriodicConstraint::sheared_sine(ShearProfile::Sine, 0.2);
  for (double z : {-0.5, 0.0, 0.3}) {
    auto r = classify_components(extract_level_graph(phi, z, 96));
    CHECK(r.num_unbounded >= 2);
    CHECK(r.num_unbounded == static_cast<int>(r.components.size()));
    for (const auto& c : r.components) {
      CHECK(c.translation_rank == 1);
      REQUIRE(c.generators.size() == 1);
      CHECK(c.generators[0].cwiseAbs() == Shift(0, 1, 0));
    }
  }
}

TEST_CASE("classification invariant under relabeling and translation") {
  auto g = extract_level_graph(PeriodicConstraint::dist_to_lattice_2d(), 0.45, 64);
  auto base = classify_components(g);
  std::vector<int> perm(g.num_vertices());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(11);
  std::shuffle(perm.begin(), perm.end(), rng);
  auto h = relabeled(g, perm);
  auto r1 = classify_components(h);
  CHECK(sorted_ranks(r1) == sorted_ranks(base));
  for (int v = 0; v < g.num_vertices(); ++v)
    CHECK(base.components[base.component_of[v]].vertices.size() ==
          r1.components[r1.component_of[perm[v]]].vertices.size());

  auto t = translated(g, vec2(0.37, 0.81));
  check_edge_geometry(t);
  auto r2 = classify_components(t);
  CHECK(sorted_ranks(r2) == sorted_ranks(base));
  CHECK(r2.num_unbounded == base.num_unbounded);

  auto lvl = extract_level_graph(PeriodicConstraint::sin_product(), 0.5, 32);
  CHECK(sorted_ranks(classify_components(translated(lvl, vec2(0.5, 0.25)))) ==
        sorted_ranks(classify_components(lvl)));
}

TEST_CASE("edge reversal leaves the graph unchanged") {
  for (double z : {0.0, 0.2, 0.6}) {
    auto g = extract_level_graph(PeriodicConstraint::dist_to_lattice_2d(), z, 48);
    if (g.num_edges() == 0) continue;
    auto h = g;
    for (auto& e : h.edges) {
      std::swap(e.tail, e.head);
      e.shift = -e.shift;
      std::reverse(e.polyline.begin(), e.polyline.end());
      for (auto& p : e.polyline) p += e.shift.cast<double>();
    }
    check_edge_geometry(h);
    CHECK(sorted_ranks(classify_components(h)) == sorted_ranks(classify_components(g)));
    CHECK(oracle::total_length(h) == doctest::Approx(oracle::total_length(g)));
  }
  // Adjacency carries both traversal directions with opposite shifts.
  auto g = extract_level_graph(PeriodicConstraint::sin_product(), 0.0, 32);
  auto adj = build_adjacency(g);
  CHECK(adj.arcs.size() == 2 * g.edges.size());
  for (int v = 0; v < g.num_vertices(); ++v) {
    for (const Arc* a = adj.begin(v); a != adj.end(v); ++a) {
      bool found = false;
      for (const Arc* b = adj.begin(a->to); b != adj.end(a->to); ++b)
        found = found || (b->edge == a->edge && b->to == v && b->shift == -a->shift);
      CHECK(found);
    }
  }
}

TEST_CASE("translation rank never exceeds the dimension") {
  auto fn = exact_network_graph(NetworkKind::FaceNetwork3D, NetworkParams{1.0 / 16.0});
  auto r = classify_components(fn);
  CHECK(r.components.size() == 1);
  CHECK(r.components[0].translation_rank == 3);
  auto sph = exact_network_graph(NetworkKind::SphereNetwork3D);
  auto rs = classify_components(sph);
  CHECK(rs.num_unbounded == 1);
  CHECK(rs.components[0].translation_rank == 3);
  for (const auto& g : {extract_level_graph(PeriodicConstraint::sin_product(), 0.0, 32),
                        exact_network_graph(NetworkKind::GridLattice2D)})
    for (const auto& c : classify_components(g).components) CHECK(c.translation_rank <= 2);
}

TEST_CASE("sphere network meshes stay on the sphere") {
  NetworkParams p;
  p.sphere_subdivisions = 2;
  auto g = exact_network_graph(NetworkKind::SphereNetwork3D, p);
  auto r = classify_components(g);
  CHECK(r.num_unbounded == 1);
  for (const auto& v : g.vertices) {
    // Distance to the nearest lattice point is one half.
    Vec3 d = v - v.array().round().matrix();
    CHECK(d.norm() == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("synth network from the l1 ball is the plain grid") {
  FinslerBallSpec spec;
  spec.half_vertices = {{Rational(1), Rational(0)}, {Rational(0), Rational(1)}};
  complete_spec(spec);
  NetworkParams p;
  p.spec = &spec;
  auto g = exact_network_graph(NetworkKind::SynthNetwork, p);
  auto grid = exact_network_graph(NetworkKind::GridLattice2D);
  double per_cell = oracle::total_length(g) / std::pow(static_cast<double>(spec.cell_size), 2);
  CHECK(per_cell == doctest::Approx(oracle::total_length(grid)));
  for (const auto& e : g.edges) CHECK(e.length == doctest::Approx((e.polyline.back() - e.polyline.front()).norm()));
}

TEST_CASE("length constant estimates") {
  auto grid = exact_network_graph(NetworkKind::GridLattice2D);
  CHECK(estimate_length_constant(grid, 100, 5) <= std::sqrt(2.0) + 1e-6);

  // Sampled pairs can only find detours that the exhaustive search also sees.
  auto circ = extract_level_graph(PeriodicConstraint::dist_to_lattice_2d(), 0.5, 16);
  double sampled = estimate_length_constant(circ, 100, 5);
  CHECK(sampled <= oracle::max_detour_ratio(circ, 3) + 1e-9);
  CHECK(sampled >= M_PI / 2 * 0.99);

  GraphBuilder b(2);
  b.add_segment(vec2(0.0, 0.5), vec2(1.0, 0.5));
  auto line = b.take();
  CHECK(estimate_length_constant(line, 50, 5) == doctest::Approx(1.0).epsilon(1e-6));
}
