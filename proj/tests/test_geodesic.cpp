#include "oschom/error.hpp"
#include "oschom/geodesic.hpp"
#include "oschom/levelset.hpp"
#include "oschom/synthesis.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace oschom;

namespace {

const double kR2 = std::sqrt(2.0);

Vec3 random_unit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
  double a = u(rng);
  return vec2(std::cos(a), std::sin(a));
}

}  // namespace

TEST_CASE("grid ball-to-ball distances agree with a window Dijkstra") {
  auto g = exact_network_graph(NetworkKind::GridLattice2D);
  double d1 = min_path_length(g, {vec2(0, 0), kR2}, {vec2(10, 0), kR2});
  CHECK(d1 == doctest::Approx(8.0));
  CHECK(oracle::window_distance(g, vec2(0, 0), kR2, vec2(10, 0), kR2, -10, 20) == doctest::Approx(8.0));
  double d2 = min_path_length(g, {vec2(0, 0), kR2}, {vec2(10, 10), kR2});
  CHECK(d2 == doctest::Approx(16.0));
  CHECK(oracle::window_distance(g, vec2(0, 0), kR2, vec2(10, 10), kR2, -5, 15) == doctest::Approx(16.0));
  CHECK(min_path_length(g, {vec2(3, 4), kR2}, {vec2(3, 4), kR2}) == 0.0);
}

TEST_CASE("level-graph distances agree with a window Dijkstra") {
  std::vector<PeriodicGraph> graphs = {extract_level_graph(PeriodicConstraint::sin_product(), 0.0, 32),
                                       extract_level_graph(PeriodicConstraint::dist_to_lattice_2d(), 0.4, 32),
                                       extract_level_graph(PeriodicConstraint::dist_to_lattice_2d(), 0.6, 24)};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const auto& g : graphs) {
    for (int s = 0; s < 4; ++s) {
      Vec3 a = vec2(u(rng), u(rng)), b = vec2(u(rng), u(rng));
      double r = 0.6;
      SearchOptions so;
      so.margin_cells = 4;
      so.allow_doubling = false;
      double lib = min_path_length(g, {a, r}, {b, r}, so);
      double ref = oracle::window_distance(g, a, r, b, r, -7, 7);
      if (std::isinf(ref)) {
        CHECK(std::isinf(lib));
      } else {
        CHECK(lib == doctest::Approx(ref).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("psi_T examples") {
  auto g = exact_network_graph(NetworkKind::GridLattice2D);
  CHECK(psi_T_z(g, vec2(1, 0), 10.0) == doctest::Approx(0.64));
  CHECK(psi_T_z(g, vec2(0, 0), 10.0) == 0.0);
  CHECK(psi_T_z(g, vec2(0, 0), 37.0) == 0.0);

  auto shear = build_degenerate(4.0);
  auto lvl = extract_level_graph(shear.phi, 0.0, 64);
  for (double T : {4.0, 8.0, 16.0}) CHECK(std::isinf(psi_T_z(lvl, vec2(1, 0), T)));
  CHECK(std::isfinite(psi_T_z(lvl, vec2(0, 1), 8.0)));
}

TEST_CASE("empty admissible ball gives infinity with a diagnostic") {
  PeriodicGraph empty;
  empty.dim = 2;
  std::string why;
  CHECK(std::isinf(psi_T_z(empty, vec2(1, 0), 10.0, {}, &why)));
  CHECK_FALSE(why.empty());
}

TEST_CASE("stable norm of the grid is the l1 norm") {
  auto g = exact_network_graph(NetworkKind::GridLattice2D);
  auto diag = stable_norm(g, vec2(1, 1) / kR2);
  CHECK(std::abs(diag.norm - kR2) <= diag.error_bound);
  CHECK(diag.norm == doctest::Approx(kR2).epsilon(1e-2));
  auto axis = stable_norm(g, vec2(1, 0));
  CHECK(std::abs(axis.norm - 1.0) <= axis.error_bound);
  CHECK(axis.schedule == default_schedule(2));
  CHECK(default_schedule(3).back() < default_schedule(2).back());
  CHECK(psi_hom_z(g, vec2(0.6, 0.8)) == doctest::Approx(1.96).epsilon(2e-2));
  CHECK(psi_hom_z(g, vec2(0, 0)) == 0.0);
}

TEST_CASE("stable norm on the radius one half circles") {
  auto g = extract_level_graph(PeriodicConstraint::dist_to_lattice_2d(), 0.5, 128);
  auto est = stable_norm(g, vec2(1, 0));
  CHECK(est.norm == doctest::Approx(M_PI / 2).epsilon(5e-2));
}

TEST_CASE("bounded components give infinity") {
  auto g = extract_level_graph(PeriodicConstraint::sin_product(), 0.5, 64);
  CHECK(std::isinf(psi_hom_z(g, vec2(1, 0))));
  CHECK(psi_hom_z(g, vec2(0, 0)) == 0.0);
}

TEST_CASE("tube energies") {
  auto phi = PeriodicConstraint::sin_product();
  double free = psi_T_zc(phi, 0.0, 2.0, vec2(1, 0), 10.0, 64);
  // Endpoint balls of radius sqrt 2 shorten the straight segment on both ends.
  CHECK(free >= std::pow(10 - 2 * kR2, 2) / 100 - 1e-9);
  CHECK(free <= 1.0 + 1e-9);
  CHECK(std::isinf(psi_T_zc(phi, 0.7, 0.1, vec2(1, 0), 10.0, 64)));
  double tube = psi_T_zc(phi, 0.0, 0.05, vec2(1, 0), 20.0, 64);
  double level = psi_T_z(extract_level_graph(phi, 0.0, 64), vec2(1, 0), 20.0);
  CHECK(std::abs(tube - level) <= 0.1 * level);
}

TEST_CASE("stable norm properties on catalog levels") {
  std::vector<PeriodicGraph> graphs = {extract_level_graph(PeriodicConstraint::sin_product(), 0.0, 64),
                                       extract_level_graph(PeriodicConstraint::dist_to_lattice_2d(), 0.5, 64)};
  std::mt19937_64 rng(17);
  for (const auto& g : graphs) {
    LiftedGraphSearch search(g);
    auto report = classify_components(g);
    for (int s = 0; s < 5; ++s) {
      Vec3 w = random_unit(rng);
      StableNormEstimate det;
      double p = psi_hom_z(search, report, w, {}, &det);
      CHECK(p == psi_hom_z(search, report, Vec3(-w), {}));
      CHECK(p >= 1.0 - 2 * det.error_bound);
      CHECK(det.envelope_ok);
      for (double lam : {0.5, 2.0, 3.0}) {
        double q = psi_hom_z(search, report, Vec3(lam * w));
        CHECK(std::abs(q - lam * lam * p) <= 2 * lam * lam * det.error_bound);
      }
    }
    // Subadditivity on a few lattice vectors.
    auto N = [&](const Vec3& v) { return std::sqrt(psi_hom_z(search, report, v)); };
    for (auto [v, w] : {std::pair{vec2(1, 0), vec2(0, 1)}, std::pair{vec2(2, 1), vec2(-1, 3)}}) {
      CHECK(N(v + w) <= N(v) + N(w) + 0.05 * (v.norm() + w.norm()));
    }
  }
}

TEST_CASE("unreachable certificate for vertical curves") {
  auto d = build_degenerate(4.0);
  auto g = extract_level_graph(d.phi, 0.0, 64);
  auto rep = classify_components(g);
  for (double T : {4.0, 20.0, 80.0}) CHECK(certify_unreachable(g, rep, {vec2(0, 0), kR2}, {vec2(T, 0), kR2}));
  CHECK_FALSE(certify_unreachable(g, rep, {vec2(0, 0), kR2}, {vec2(0, 10), kR2}));
}

TEST_CASE("sign normalisation") {
  CHECK(sign_normalized(vec2(-1, 2)) == vec2(1, -2));
  CHECK(sign_normalized(vec2(0, -3)) == vec2(0, 3));
  CHECK(sign_normalized(vec2(2, -3)) == vec2(2, -3));
}
