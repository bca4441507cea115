#include "oschom/constraint.hpp"
#include "oschom/error.hpp"
#include "oschom/graph_io.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <random>

using namespace oschom;

namespace {

Vec3 central_difference(const PeriodicConstraint& phi, const Vec3& x, double h = 1e-6) {
  Vec3 g = Vec3::Zero();
  for (int i = 0; i < phi.dim(); ++i) {
    Vec3 e = Vec3::Zero();
    e(i) = h;
    g(i) = (phi.value(x + e) - phi.value(x - e)) / (2 * h);
  }
  return g;
}

std::vector<double> tabulate(const PeriodicConstraint& phi, int res) {
  std::vector<double> v(res * res);
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) v[j * res + i] = phi.value(vec2(double(i) / res, double(j) / res));
  return v;
}

}  // namespace

TEST_CASE("catalog values at known points") {
  auto sp = PeriodicConstraint::sin_product();
  CHECK(eval_constraint(sp, vec2(0.25, 0.25)) == doctest::Approx(1.0));
  CHECK(eval_constraint(sp, vec2(0.0, 0.7)) == doctest::Approx(0.0));

  auto dl = PeriodicConstraint::dist_to_lattice_2d();
  double corner_min = 1e9;
  for (int a = 0; a <= 1; ++a)
    for (int b = 0; b <= 1; ++b) corner_min = std::min(corner_min, std::hypot(0.5 - a, 0.5 - b));
  CHECK(eval_constraint(dl, vec2(0.5, 0.5)) == doctest::Approx(corner_min).epsilon(1e-12));

  auto d3 = PeriodicConstraint::dist_to_lattice_3d();
  CHECK(d3.value(Vec3(0.5, 0.5, 0.5)) == doctest::Approx(0.75));
  CHECK(d3.value(Vec3(0.1, 0.0, 0.0)) == doctest::Approx(0.01));

  auto fn = PeriodicConstraint::face_network_3d();
  CHECK(fn.value(Vec3(0.0, 0.3, 0.8)) == doctest::Approx(0.0));
  CHECK(fn.value(Vec3(0.5, 0.5, 0.5)) > 0.0);
}

TEST_CASE("constraints are one-periodic") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<PeriodicConstraint> cat = {PeriodicConstraint::sin_product(), PeriodicConstraint::dist_to_lattice_2d(),
                                         PeriodicConstraint::sheared_sine(ShearProfile::Sine, 0.3),
                                         PeriodicConstraint::sheared_sine(ShearProfile::Sawtooth, 1.5),
                                         PeriodicConstraint::dist_to_lattice_3d(), PeriodicConstraint::face_network_3d()};
  for (const auto& phi : cat) {
    for (int s = 0; s < 30; ++s) {
      Vec3 x(u(rng), u(rng), phi.dim() == 3 ? u(rng) : 0.0);
      Shift k(int(std::floor(u(rng))), int(std::floor(u(rng))), phi.dim() == 3 ? 2 : 0);
      CHECK(phi.value(x + k.cast<double>()) == doctest::Approx(phi.value(x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("gradients match finite differences") {
  auto sp = PeriodicConstraint::sin_product();
  Vec3 g = grad_constraint(sp, vec2(0.25, 0.25));
  CHECK(g.norm() < 1e-12);
  g = grad_constraint(sp, vec2(0.0, 0.25));
  CHECK(g(0) == doctest::Approx(2 * M_PI));
  CHECK(g(1) == doctest::Approx(0.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<PeriodicConstraint> smooth = {sp, PeriodicConstraint::sheared_sine(ShearProfile::Sine, 0.2),
                                            PeriodicConstraint::dist_to_lattice_3d()};
  for (const auto& phi : smooth) {
    for (int s = 0; s < 20; ++s) {
      Vec3 x(u(rng), u(rng), phi.dim() == 3 ? u(rng) * 0.4 : 0.0);
      Vec3 fd = central_difference(phi, x);
      CHECK((phi.gradient(x) - fd).norm() <= 1e-5 * (1.0 + fd.norm()));
    }
  }
}

TEST_CASE("hessian matches differentiated gradient") {
  auto sp = PeriodicConstraint::sin_product();
  REQUIRE(sp.has_analytic_hessian());
  Vec3 x = vec2(0.13, 0.41);
  Mat3 H = sp.hessian(x);
  double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Vec3 e = Vec3::Zero();
    e(i) = h;
    Vec3 col = (sp.gradient(x + e) - sp.gradient(x - e)) / (2 * h);
    for (int j = 0; j < 2; ++j) CHECK(H(j, i) == doctest::Approx(col(j)).epsilon(1e-5));
  }
}

TEST_CASE("grid-sampled constraint approximates its source") {
  auto sp = PeriodicConstraint::sin_product();
  auto grid = PeriodicConstraint::grid_sampled(2, 512, tabulate(sp, 512));
  Vec3 x = vec2(0.1, 0.2);
  CHECK(grid.value(x) == doctest::Approx(sp.value(x)).epsilon(1e-3));
  CHECK((grid.gradient(x) - sp.gradient(x)).norm() < 1e-3 * sp.gradient(x).norm() + 1e-2);
  // Node values are reproduced exactly.
  CHECK(grid.value(vec2(3.0 / 512, 7.0 / 512)) == doctest::Approx(sp.value(vec2(3.0 / 512, 7.0 / 512))));
}

TEST_CASE("image ranges") {
  auto r = image_range(PeriodicConstraint::sin_product(), 256);
  CHECK(r.lo == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(r.hi == doctest::Approx(1.0).epsilon(1e-3));
  r = image_range(PeriodicConstraint::dist_to_lattice_2d(), 256);
  CHECK(std::abs(r.lo) < 1e-2);
  CHECK(r.hi == doctest::Approx(std::sqrt(0.5)).epsilon(1e-2));
  r = image_range(PeriodicConstraint::sheared_sine(ShearProfile::Sine, 0.25), 256);
  CHECK(r.lo == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(r.hi == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("catalog ids round-trip and reject unknown names") {
  for (auto id : {"zero", "sin-product", "dist-z2", "face-network-3d", "dist-z3"}) {
    auto phi = make_constraint(id);
    CHECK(phi.id() == id);
  }
  CHECK_THROWS_AS(make_constraint("no-such-kind"), Error);
}

TEST_CASE("grid file loading") {
  auto dir = std::filesystem::temp_directory_path() / "oschom_constraint_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "grid.csv";
  write_text_file(path, "2,2\n0,1\n2,3\n");
  auto phi = PeriodicConstraint::load_grid_file(path.string());
  CHECK(phi.dim() == 2);
  CHECK(phi.grid_resolution() == 2);
  CHECK(phi.value(vec2(0.5, 0.0)) == doctest::Approx(1.0));
  CHECK(phi.value(vec2(0.25, 0.0)) == doctest::Approx(0.5));

  // Binary layout: int32 m, int32 resolution, doubles x-fastest.
  auto bin = dir / "grid.bin";
  {
    std::string bytes(8 + 4 * sizeof(double), '\0');
    std::int32_t header[2] = {2, 2};
    double vals[4] = {0, 1, 2, 3};
    std::memcpy(bytes.data(), header, 8);
    std::memcpy(bytes.data() + 8, vals, sizeof(vals));
    write_text_file(bin, bytes);
  }
  auto phib = PeriodicConstraint::load_grid_file(bin.string());
  CHECK(phib.value(vec2(0.0, 0.5)) == doctest::Approx(2.0));

  write_text_file(path, "2,3\n0,1\n");
  CHECK_THROWS_AS(PeriodicConstraint::load_grid_file(path.string()), Error);
  write_text_file(bin, std::string("\x02\x00", 2));
  CHECK_THROWS_AS(PeriodicConstraint::load_grid_file(bin.string()), Error);
  CHECK_THROWS_AS(PeriodicConstraint::load_grid_file((dir / "missing.csv").string()), Error);
  std::filesystem::remove_all(dir);
}
