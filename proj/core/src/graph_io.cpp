#include "oschom/graph_io.hpp"

#include "oschom/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace oschom {

namespace {

using nlohmann::json;

json vec_json(const Vec3& v, int dim) {
  json a = json::array();
  for (int d = 0; d < dim; ++d) a.push_back(v(d));
  return a;
}

Vec3 json_vec(const json& a, int dim) {
  if (!a.is_array() || static_cast<int>(a.size()) != dim) {
    fail(ErrorCode::ConfigError, "expected an array of " + std::to_string(dim) + " numbers");
  }
  Vec3 v = Vec3::Zero();
  for (int d = 0; d < dim; ++d) v(d) = a[d].get<double>();
  return v;
}

}  // namespace

std::string graph_to_json(const PeriodicGraph& g) {
  json j;
  j["dim"] = g.dim;
  j["vertices"] = json::array();
  for (const auto& v : g.vertices) j["vertices"].push_back(vec_json(v, g.dim));
  j["edges"] = json::array();
  for (const auto& e : g.edges) {
    json je;
    je["tail"] = e.tail;
    je["head"] = e.head;
    json s = json::array();
    for (int d = 0; d < g.dim; ++d) s.push_back(e.shift(d));
    je["shift"] = s;
    je["length"] = e.length;
    je["polyline"] = json::array();
    for (const auto& p : e.polyline) je["polyline"].push_back(vec_json(p, g.dim));
    j["edges"].push_back(std::move(je));
  }
  if (g.level) j["level"] = *g.level;
  return j.dump(1);
}

PeriodicGraph graph_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("graph JSON: ") + e.what());
  }
  try {
    PeriodicGraph g;
    g.dim = j.at("dim").get<int>();
    if (g.dim != 2 && g.dim != 3) fail(ErrorCode::ConfigError, "graph JSON: dim must be 2 or 3");
    for (const auto& v : j.at("vertices")) g.vertices.push_back(json_vec(v, g.dim));
    int nv = static_cast<int>(g.vertices.size());
    for (const auto& je : j.at("edges")) {
      GraphEdge e;
      e.tail = je.at("tail").get<int>();
      e.head = je.at("head").get<int>();
      if (e.tail < 0 || e.tail >= nv || e.head < 0 || e.head >= nv) {
        fail(ErrorCode::ConfigError, "graph JSON: edge endpoint out of range");
      }
      const json& s = je.at("shift");
      if (!s.is_array() || static_cast<int>(s.size()) != g.dim) fail(ErrorCode::ConfigError, "graph JSON: bad shift");
      e.shift = Shift::Zero();
      for (int d = 0; d < g.dim; ++d) e.shift(d) = s[d].get<int>();
      if (je.contains("polyline")) {
        for (const auto& p : je.at("polyline")) e.polyline.push_back(json_vec(p, g.dim));
      }
      if (e.polyline.size() < 2) e.polyline = {g.vertices[e.tail], g.vertices[e.head] + e.shift.cast<double>()};
      e.length = je.contains("length") ? je.at("length").get<double>() : polyline_length(e.polyline);
      double chord = (g.vertices[e.head] + e.shift.cast<double>() - g.vertices[e.tail]).norm();
      if (e.length < chord - 1e-9) fail(ErrorCode::ConfigError, "graph JSON: edge shorter than its chord");
      g.edges.push_back(std::move(e));
    }
    if (j.contains("level")) g.level = j.at("level").get<double>();
    return g;
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("graph JSON: ") + e.what());
  }
}

std::string metric_to_json(const HomogenizedMetric& m) {
  json j;
  j["dim"] = m.dim;
  j["levels_used"] = m.levels_used;
  j["directions"] = json::array();
  for (const auto& d : m.directions) j["directions"].push_back(vec_json(d, m.dim));
  j["psi_values"] = json::array();
  for (double p : m.psi_values) {
    if (std::isfinite(p)) {
      j["psi_values"].push_back(p);
    } else {
      j["psi_values"].push_back(nullptr);
    }
  }
  j["ball_vertices"] = json::array();
  for (const auto& v : m.ball_vertices) j["ball_vertices"].push_back(vec_json(v, m.dim));
  j["labels"] = m.labels;
  return j.dump(1);
}

namespace {

struct SvgFrame {
  double lo, hi;
  double px = 600.0;
  double x(double v) const { return (v - lo) / (hi - lo) * px; }
  double y(double v) const { return px - (v - lo) / (hi - lo) * px; }
};

std::string header(double px) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px << "\" height=\"" << px << "\" viewBox=\"0 0 "
     << px << ' ' << px << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os.str();
}

void polyline_svg(std::ostream& os, const SvgFrame& f, const std::vector<Vec3>& pts, const Vec3& offset,
                  const char* stroke, double width) {
  os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width << "\" points=\"";
  for (const auto& p : pts) os << f.x(p.x() + offset.x()) << ',' << f.y(p.y() + offset.y()) << ' ';
  os << "\"/>\n";
}

}  // namespace

std::string graph_svg(const PeriodicGraph& g, const DiscreteCurve* overlay, double overlay_scale) {
  if (g.dim != 2) fail(ErrorCode::UnsupportedKind, "SVG rendering needs a 2D graph");
  SvgFrame f{-1.0, 2.0};
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << header(f.px);
  for (int i = -1; i <= 2; ++i) {
    os << "<line x1=\"" << f.x(i) << "\" y1=\"0\" x2=\"" << f.x(i) << "\" y2=\"" << f.px
       << "\" stroke=\"#ddd\"/>\n<line x1=\"0\" y1=\"" << f.y(i) << "\" x2=\"" << f.px << "\" y2=\"" << f.y(i)
       << "\" stroke=\"#ddd\"/>\n";
  }
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      Vec3 off(a, b, 0.0);
      for (const auto& e : g.edges) polyline_svg(os, f, e.polyline, off, "#1f4e9c", 1.2);
    }
  }
  if (overlay) {
    std::vector<Vec3> pts;
    for (const auto& p : overlay->nodes) pts.push_back(p * overlay_scale);
    polyline_svg(os, f, pts, Vec3::Zero(), "#c0392b", 1.5);
  }
  os << "</svg>\n";
  return os.str();
}

std::string ball_svg(const HomogenizedMetric& m) {
  if (m.dim != 2) fail(ErrorCode::UnsupportedKind, "ball SVG needs a 2D metric");
  double r = 1.0;
  for (const auto& v : m.ball_vertices) r = std::max(r, v.norm());
  SvgFrame f{-1.15 * r, 1.15 * r};
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << header(f.px);
  os << "<line x1=\"0\" y1=\"" << f.y(0) << "\" x2=\"" << f.px << "\" y2=\"" << f.y(0) << "\" stroke=\"#ccc\"/>\n";
  os << "<line x1=\"" << f.x(0) << "\" y1=\"0\" x2=\"" << f.x(0) << "\" y2=\"" << f.px << "\" stroke=\"#ccc\"/>\n";
  os << "<circle cx=\"" << f.x(0) << "\" cy=\"" << f.y(0) << "\" r=\"" << f.x(1) - f.x(0)
     << "\" fill=\"none\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
  if (m.ball.rank == 2) {
    os << "<polygon fill=\"#1f4e9c22\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
    for (const auto& v : m.ball_vertices) os << f.x(v.x()) << ',' << f.y(v.y()) << ' ';
    os << "\"/>\n";
  } else if (!m.ball_vertices.empty()) {
    std::vector<Vec3> seg = m.ball_vertices;
    polyline_svg(os, f, seg, Vec3::Zero(), "#1f4e9c", 2.0);
  }
  os << "</svg>\n";
  return os.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

}  // namespace oschom
