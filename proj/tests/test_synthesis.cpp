#include "oschom/error.hpp"
#include "oschom/levelset.hpp"
#include "oschom/synthesis.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace oschom;

namespace {

FinslerBallSpec square_spec(const Rational& s) {
  FinslerBallSpec spec;
  spec.half_vertices = {{s, Rational(0)}, {Rational(0), s}};
  complete_spec(spec);
  return spec;
}

double hausdorff_to_boundary(const FinslerBallSpec& spec, const PsiFunction& psi) {
  double worst = 0.0;
  for (int k = 0; k < 720; ++k) {
    double a = 2 * M_PI * k / 720;
    Vec3 u = vec2(std::cos(a), std::sin(a));
    double r_spec = 1.0 / std::sqrt(spec.psi(u));
    double r_target = 1.0 / std::sqrt(psi(u));
    worst = std::max(worst, std::abs(r_spec - r_target));
  }
  return worst;
}

}  // namespace

TEST_CASE("certificates are exact") {
  FinslerBallSpec spec;
  spec.half_vertices = {{Rational(3, 5), Rational(4, 5)}, {Rational(-2, 3), Rational(1, 3)}, {Rational(1, 2), Rational(0)}};
  complete_spec(spec);
  CHECK(check_certificates(spec));
  for (std::size_t i = 0; i < spec.half_vertices.size(); ++i) {
    const auto& c = spec.certificates[i];
    CHECK(c.t * spec.half_vertices[i][0] == Rational(c.lattice_point[0]));
    CHECK(c.t * spec.half_vertices[i][1] == Rational(c.lattice_point[1]));
    CHECK(spec.target_values[i] >= 1.0);
  }
  CHECK(spec.cell_size == Rational(30));  // lcm of t = 5, 3, 2
  auto bad = spec;
  bad.certificates[0].t += 1;
  CHECK_FALSE(check_certificates(bad));
  CHECK_THROWS_AS(build_network(bad), Error);
}

TEST_CASE("spec polygon gauge") {
  auto spec = square_spec(Rational(1));
  CHECK(spec.psi(vec2(0.6, 0.8)) == doctest::Approx(1.96));
  CHECK(spec.vertices().size() == 4);
  auto v = spec.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    Vec3 a = v[(i + 1) % v.size()] - v[i], b = v[(i + 2) % v.size()] - v[(i + 1) % v.size()];
    CHECK(a(0) * b(1) - a(1) * b(0) > 0);
  }
}

TEST_CASE("rationalize the l1 ball exactly") {
  auto spec = rationalize_ball([](const Vec3& w) { return std::pow(std::abs(w(0)) + std::abs(w(1)), 2); }, 2, 0.05);
  REQUIRE(spec.half_vertices.size() == 2);
  CHECK(spec.half_vertices[0][0] == 1);
  CHECK(spec.half_vertices[0][1] == 0);
  CHECK(spec.half_vertices[1][0] == 0);
  CHECK(spec.half_vertices[1][1] == 1);
  CHECK(spec.cell_size == 1);
}

TEST_CASE("rationalize round balls") {
  PsiFunction euclid = [](const Vec3& w) { return w.squaredNorm(); };
  auto oct = rationalize_ball(euclid, 4, 0.05);
  CHECK(oct.half_vertices.size() == 4);
  for (std::size_t i = 0; i < oct.half_vertices.size(); ++i) CHECK(oct.half_vertex(i).norm() <= 1.0 + 1e-12);
  CHECK(check_certificates(oct));

  PsiFunction twice = [](const Vec3& w) { return 2 * w.squaredNorm(); };
  auto spec = rationalize_ball(twice, 4, 0.05);
  for (std::size_t i = 0; i < spec.half_vertices.size(); ++i)
    CHECK(spec.half_vertex(i).norm() == doctest::Approx(1 / std::sqrt(2.0)).epsilon(0.05));
  // Inscribed octagon of the radius 1/sqrt(2) circle, up to rounding.
  CHECK(hausdorff_to_boundary(spec, twice) <= 0.05 + (1 - std::cos(M_PI / 8)) / std::sqrt(2.0));
}

TEST_CASE("rationalize rejects bad input") {
  PsiFunction euclid = [](const Vec3& w) { return w.squaredNorm(); };
  CHECK_THROWS_AS(rationalize_ball(euclid, 1, 0.05), Error);
  CHECK_THROWS_AS(rationalize_ball(euclid, 4, 0.0), Error);
  try {
    rationalize_ball(euclid, 4, 1e-6);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TolTooTight);
  }
}

TEST_CASE("degenerate construction") {
  auto flat = build_degenerate(1.0);
  CHECK(flat.amplitude == 0.0);
  CHECK(flat.phi.value(vec2(0.25, 0.7)) == doctest::Approx(1.0));

  auto saw = build_degenerate(4.0);
  CHECK(saw.amplitude == doctest::Approx(std::sqrt(3.0)));
  CHECK(saw.period_length == doctest::Approx(2.0));

  auto sine = build_degenerate(4.0, ShearProfile::Sine);
  double A = sine.amplitude;
  double ref = oracle::simpson(
      [A](double y) {
        double gp = 2 * M_PI * A * std::cos(2 * M_PI * y);
        return std::sqrt(1 + gp * gp);
      },
      0.0, 1.0, 2000);
  CHECK(sine.period_length == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(ref == doctest::Approx(2.0).epsilon(1e-9));

  try {
    build_degenerate(0.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleK);
  }
  CHECK_THROWS_AS(shear_period_length(PeriodicConstraint::sin_product()), Error);
}

TEST_CASE("degenerate level graphs have the prescribed length") {
  for (auto profile : {ShearProfile::Sawtooth, ShearProfile::Sine}) {
    auto d = build_degenerate(4.0, profile);
    auto g = extract_level_graph(d.phi, 0.0, 128);
    auto rep = classify_components(g);
    CHECK(rep.num_unbounded >= 2);
    for (const auto& c : rep.components) {
      CHECK(c.translation_rank == 1);
      CHECK(c.generators[0].cwiseAbs() == Shift(0, 1, 0));
    }
    // Two curve copies per cell, each of length sqrt(k) per period.
    CHECK(oracle::total_length(g) == doctest::Approx(2 * d.period_length).epsilon(2e-2));
  }
}

TEST_CASE("l1 spec builds the plain grid") {
  auto spec = square_spec(Rational(1));
  auto g = build_network(spec);
  for (const auto& e : g.edges) CHECK(e.polyline.size() == 2);
  auto check = verify_synthesis(g, spec, 32);
  CHECK(check.max_relative_error <= 0.05);
  CHECK(check.upper_ok);
  CHECK(check.lower_ok);
}

TEST_CASE("scaled square spec wiggles its edges") {
  auto spec = square_spec(Rational(1, 2));  // psi = 4 on the axes
  for (auto shape : {WiggleShape::Triangle, WiggleShape::Arc}) {
    auto g = build_network(spec, shape);
    for (const auto& e : g.edges) {
      double chord = (e.polyline.back() - e.polyline.front()).norm();
      CHECK(e.length == doctest::Approx(2.0 * chord).epsilon(1e-9));
      double drawn = polyline_length(e.polyline);
      if (shape == WiggleShape::Triangle) {
        CHECK(drawn == doctest::Approx(e.length).epsilon(1e-9));
      } else {
        // Arcs are drawn as inscribed polylines.
        CHECK(drawn <= e.length);
        CHECK(drawn >= 0.99 * e.length);
      }
    }
    auto rep = classify_components(g);
    CHECK(rep.num_unbounded == 1);
    CHECK(rep.components.size() == 1);
    CHECK(rep.components[0].translation_rank == 2);
  }
  auto check = verify_synthesis(build_network(spec), spec, 16);
  for (std::size_t k = 0; k < check.directions.size(); ++k)
    CHECK(check.computed[k] == doctest::Approx(check.target[k]).epsilon(5e-2));
  CHECK(check.lower_ok);
}

TEST_CASE("hexagonal spec reaches its targets") {
  FinslerBallSpec spec;
  spec.half_vertices = {{Rational(1), Rational(0)}, {Rational(1, 2), Rational(1, 2)}, {Rational(0), Rational(1, 2)}};
  complete_spec(spec);
  std::vector<double> targets = spec.target_values;
  std::sort(targets.begin(), targets.end());
  CHECK(targets == std::vector<double>{1.0, 2.0, 4.0});
  auto g = build_network(spec);
  auto check = verify_synthesis(g, spec, 32);
  CHECK(check.upper_ok);
  CHECK(check.lower_ok);
  for (std::size_t i = 0; i < spec.half_vertices.size(); ++i) {
    Vec3 nu = spec.half_vertex(i).normalized();
    for (std::size_t k = 0; k < check.directions.size(); ++k) {
      if ((check.directions[k] - nu).norm() < 1e-9)
        CHECK(check.computed[k] == doctest::Approx(spec.target_values[i]).epsilon(5e-2));
    }
  }
}

TEST_CASE("random specs are valid and reproducible") {
  auto a = random_rational_spec(42, 3);
  auto b = random_rational_spec(42, 3);
  CHECK(spec_to_json(a) == spec_to_json(b));
  CHECK(check_certificates(a));
  for (std::size_t i = 0; i < a.half_vertices.size(); ++i) CHECK(a.half_vertex(i).norm() <= 1.0);
  auto g = build_network(a);
  auto check = verify_synthesis(g, a, 32);
  CHECK(check.max_relative_error <= 0.10);
}

TEST_CASE("spec JSON round trip") {
  auto a = random_rational_spec(7, 3);
  auto b = spec_from_json(spec_to_json(a));
  CHECK(b.half_vertices == a.half_vertices);
  CHECK(b.cell_size == a.cell_size);
  CHECK(check_certificates(b));
  CHECK_THROWS_AS(spec_from_json("{"), Error);
  CHECK_THROWS_AS(spec_from_json(R"({"vertices": [[1]]})"), Error);
  CHECK_THROWS_AS(spec_from_json(R"({"vertices": [["1/0", "1"]]})"), Error);
  auto c = spec_from_json(R"({"vertices": [["1/2", 0], [0, "1/3"]]})");
  CHECK(c.target_values.size() == 2);
}
