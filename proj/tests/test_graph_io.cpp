#include "oschom/error.hpp"
#include "oschom/graph_io.hpp"
#include "oschom/levelset.hpp"
#include "oschom/metric.hpp"

#include <doctest.h>

#include <json.hpp>

#include <filesystem>

using namespace oschom;

TEST_CASE("graph JSON round trip") {
  auto g = extract_level_graph(PeriodicConstraint::dist_to_lattice_2d(), 0.4, 32);
  auto h = graph_from_json(graph_to_json(g));
  REQUIRE(h.num_vertices() == g.num_vertices());
  REQUIRE(h.num_edges() == g.num_edges());
  CHECK(h.level == g.level);
  for (int v = 0; v < g.num_vertices(); ++v) CHECK((h.vertices[v] - g.vertices[v]).norm() == 0.0);
  for (int i = 0; i < g.num_edges(); ++i) {
    CHECK(h.edges[i].shift == g.edges[i].shift);
    CHECK(h.edges[i].length == g.edges[i].length);
    CHECK(h.edges[i].polyline.size() == g.edges[i].polyline.size());
  }
  CHECK(graph_to_json(h) == graph_to_json(g));

  auto f = exact_network_graph(NetworkKind::FaceNetwork3D);
  auto f2 = graph_from_json(graph_to_json(f));
  CHECK(f2.dim == 3);
  CHECK(f2.num_edges() == f.num_edges());
}

TEST_CASE("malformed graph JSON is rejected") {
  auto expect_config_error = [](const std::string& text) {
    try {
      graph_from_json(text);
      FAIL("accepted: " << text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
    }
  };
  expect_config_error("not json");
  expect_config_error(R"({"dim": 4, "vertices": [], "edges": []})");
  expect_config_error(R"({"dim": 2, "vertices": [[0, 0]], "edges": [{"tail": 0, "head": 1, "shift": [1, 0], "length": 1}]})");
  expect_config_error(R"({"dim": 2, "vertices": [[0, 0]], "edges": [{"tail": 0, "head": 0, "shift": [1], "length": 1}]})");
  // Shorter than the chord between its lifted ends.
  expect_config_error(R"({"dim": 2, "vertices": [[0, 0]], "edges": [{"tail": 0, "head": 0, "shift": [1, 0], "length": 0.5}]})");
  auto ok = graph_from_json(
      R"({"dim": 2, "vertices": [[0, 0]], "edges": [{"tail": 0, "head": 0, "shift": [1, 0], "length": 1}, {"tail": 0, "head": 0, "shift": [0, 1], "length": 1}]})");
  CHECK(classify_components(ok).components[0].translation_rank == 2);
}

TEST_CASE("metric JSON encodes infinities as null") {
  MetricOptions opts;
  opts.directions = 8;
  opts.resolution = 32;
  auto m = assemble_metric(PeriodicConstraint::sheared_sine(ShearProfile::Sawtooth, 1.0), {0.0}, opts);
  auto j = nlohmann::json::parse(metric_to_json(m));
  CHECK(j["dim"] == 2);
  CHECK(j["directions"].size() == 8);
  bool saw_null = false;
  for (const auto& v : j["psi_values"]) saw_null = saw_null || v.is_null();
  CHECK(saw_null);
  CHECK(j.contains("ball_vertices"));
  CHECK(j.contains("levels_used"));
}

TEST_CASE("SVG output") {
  auto g = extract_level_graph(PeriodicConstraint::sin_product(), 0.0, 16);
  auto svg = graph_svg(g);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  auto m = assemble_metric(PeriodicConstraint::zero(2), {});
  auto ball = ball_svg(m);
  CHECK(ball.find("<circle") != std::string::npos);
}

TEST_CASE("text file helpers") {
  auto dir = std::filesystem::temp_directory_path() / "oschom_io_test" / "nested";
  write_text_file(dir / "a.txt", "hello\n");
  CHECK(read_text_file(dir / "a.txt") == "hello\n");
  CHECK_THROWS_AS(read_text_file(dir / "missing.txt"), Error);
  std::filesystem::remove_all(dir.parent_path());
}
