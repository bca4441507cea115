#include "oschom/synthesis.hpp"

#include "oschom/error.hpp"
#include "oschom/hull.hpp"
#include "oschom/metric.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace oschom {

namespace {

double to_double(const Rational& r) { return static_cast<double>(r); }

BigInt gcd_big(BigInt a, BigInt b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    BigInt t = a % b;
    a = b;
    b = t;
  }
  return a;
}

BigInt lcm_big(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  BigInt g = gcd_big(a, b);
  BigInt l = a / g * b;
  return l < 0 ? BigInt(-l) : l;
}

Rational parse_rational(const nlohmann::json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number()) {
    // Decimal numbers are read through their shortest text form.
    std::string s = j.dump();
    auto dot = s.find('.');
    if (dot == std::string::npos || s.find_first_of("eE") != std::string::npos) {
      fail(ErrorCode::ConfigError, "non-integer rational coordinates must be given as \"p/q\" strings");
    }
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    BigInt den = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return Rational(BigInt(digits), den);
  }
  if (!j.is_string()) fail(ErrorCode::ConfigError, "rational value must be a number or a \"p/q\" string");
  std::string s = j.get<std::string>();
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt den(s.substr(slash + 1));
    if (den == 0) fail(ErrorCode::ConfigError, "zero denominator in '" + s + "'");
    return Rational(BigInt(s.substr(0, slash)), den);
  } catch (const std::runtime_error&) {
    fail(ErrorCode::ConfigError, "cannot parse rational '" + s + "'");
  }
}

std::string rational_text(const Rational& r) {
  BigInt n = boost::multiprecision::numerator(r), d = boost::multiprecision::denominator(r);
  return d == 1 ? n.str() : n.str() + "/" + d.str();
}

// Largest k / m <= x with the smallest m whose error, scaled by `weight`, is
// within `budget`.
Rational round_down(double x, double weight, double budget, long long max_den) {
  for (long long m = 1; m <= max_den; ++m) {
    long long k = static_cast<long long>(std::floor(x * m + 1e-12));
    if ((x - static_cast<double>(k) / m) * weight <= budget) return Rational(k, m);
  }
  long long k = static_cast<long long>(std::floor(x * max_den));
  return Rational(k, max_den);
}

double polygon_gauge(const std::vector<Vec3>& ccw, const Vec3& w) {
  double g = 0.0;
  for (std::size_t i = 0; i < ccw.size(); ++i) {
    const Vec3& a = ccw[i];
    const Vec3& b = ccw[(i + 1) % ccw.size()];
    Vec3 n(b[1] - a[1], -(b[0] - a[0]), 0.0);
    double off = n.dot(a);
    if (off > 0.0) g = std::max(g, n.dot(w) / off);
  }
  return g;
}

double segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  auto point_seg = [](const Vec3& p, const Vec3& a, const Vec3& b) {
    Vec3 ab = b - a;
    double l2 = ab.squaredNorm();
    double t = l2 > 0.0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
    return (p - (a + t * ab)).norm();
  };
  Vec3 d1 = p1 - p0, d2 = q1 - q0;
  double den = d1[0] * d2[1] - d1[1] * d2[0];
  if (std::abs(den) > 1e-15) {
    Vec3 r = q0 - p0;
    double s = (r[0] * d2[1] - r[1] * d2[0]) / den;
    double t = (r[0] * d1[1] - r[1] * d1[0]) / den;
    if (s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0) return 0.0;
  }
  return std::min({point_seg(p0, q0, q1), point_seg(p1, q0, q1), point_seg(q0, p0, p1), point_seg(q1, p0, p1)});
}

std::vector<Vec3> triangle_wiggle(const Vec3& a, const Vec3& c, double margin, double ratio, int teeth) {
  Vec3 d = c - a;
  double len = d.norm();
  Vec3 e = d / len;
  Vec3 nrm(-e[1], e[0], 0.0);
  Vec3 p0 = a + margin * len * e;
  double base = (1.0 - 2.0 * margin) * len;
  double step = base / teeth;
  double amp = 0.5 * step * std::sqrt(std::max(ratio * ratio - 1.0, 0.0));
  std::vector<Vec3> pts{a, p0};
  for (int j = 0; j < teeth; ++j) {
    double side = (j % 2 == 0) ? 1.0 : -1.0;
    pts.push_back(p0 + (j + 0.5) * step * e + side * amp * nrm);
    pts.push_back(p0 + (j + 1.0) * step * e);
  }
  pts.push_back(c);
  return pts;
}

// Solves theta / sin(theta) = ratio on (0, pi).
double arc_half_angle(double ratio) {
  double lo = 0.0, hi = std::numbers::pi;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double f = mid / std::sin(mid);
    (f < ratio ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<Vec3> arc_wiggle(const Vec3& a, const Vec3& c, double margin, double ratio, int arcs) {
  Vec3 d = c - a;
  double len = d.norm();
  Vec3 e = d / len;
  Vec3 nrm(-e[1], e[0], 0.0);
  Vec3 p0 = a + margin * len * e;
  double chord = (1.0 - 2.0 * margin) * len / arcs;
  double theta = arc_half_angle(ratio);
  double radius = 0.5 * chord / std::sin(theta);
  std::vector<Vec3> pts{a, p0};
  const int samples = 16;
  for (int j = 0; j < arcs; ++j) {
    double side = (j % 2 == 0) ? 1.0 : -1.0;
    Vec3 mid = p0 + (j + 0.5) * chord * e;
    Vec3 center = mid - side * radius * std::cos(theta) * nrm;
    for (int s = 1; s <= samples; ++s) {
      double ang = -theta + 2.0 * theta * s / samples;
      // Angle measured from the bulge direction, sweeping from start to end chord point.
      Vec3 q = center + radius * (std::sin(ang) * e + side * std::cos(ang) * nrm);
      pts.push_back(q);
    }
  }
  pts.back() = p0 + arcs * chord * e;
  pts.push_back(c);
  return pts;
}

double wiggle_height(WiggleShape shape, double base, double ratio, int pieces) {
  double step = base / pieces;
  if (shape == WiggleShape::Triangle) return 0.5 * step * std::sqrt(std::max(ratio * ratio - 1.0, 0.0));
  double theta = arc_half_angle(ratio);
  double radius = 0.5 * step / std::sin(theta);
  return radius * (1.0 - std::cos(theta));
}

}  // namespace

Vec3 FinslerBallSpec::half_vertex(std::size_t i) const {
  return vec2(to_double(half_vertices[i][0]), to_double(half_vertices[i][1]));
}

std::vector<Vec3> FinslerBallSpec::vertices() const {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < half_vertices.size(); ++i) out.push_back(half_vertex(i));
  for (std::size_t i = 0; i < half_vertices.size(); ++i) out.push_back(-half_vertex(i));
  return out;
}

double FinslerBallSpec::psi(const Vec3& w) const {
  std::vector<Vec3> hull = planar_hull(vertices());
  double g = polygon_gauge(hull, w);
  return g * g;
}

void complete_spec(FinslerBallSpec& spec) {
  if (spec.half_vertices.empty()) fail(ErrorCode::InvalidArgument, "spec has no vertices");
  // Order by polar angle in [0, pi).
  for (auto& v : spec.half_vertices) {
    if (v[1] < 0 || (v[1] == 0 && v[0] < 0)) v = {Rational(-v[0]), Rational(-v[1])};
    if (v[0] == 0 && v[1] == 0) fail(ErrorCode::InvalidArgument, "zero vertex in spec");
  }
  std::sort(spec.half_vertices.begin(), spec.half_vertices.end(), [](const auto& a, const auto& b) {
    return std::atan2(to_double(a[1]), to_double(a[0])) < std::atan2(to_double(b[1]), to_double(b[0]));
  });
  spec.certificates.clear();
  spec.target_values.clear();
  BigInt num_lcm = 1, den_gcd = 0;
  for (const auto& v : spec.half_vertices) {
    BigInt l = lcm_big(boost::multiprecision::denominator(v[0]), boost::multiprecision::denominator(v[1]));
    BigInt x = boost::multiprecision::numerator(v[0]) * (l / boost::multiprecision::denominator(v[0]));
    BigInt y = boost::multiprecision::numerator(v[1]) * (l / boost::multiprecision::denominator(v[1]));
    BigInt g = gcd_big(x, y);
    RationalCertificate c;
    c.t = Rational(l, g);
    BigInt zx = x / g, zy = y / g;
    if (boost::multiprecision::abs(zx) > 1'000'000 || boost::multiprecision::abs(zy) > 1'000'000) {
      fail(ErrorCode::TolTooTight, "lattice direction too large for a desk-scale cell");
    }
    c.lattice_point = Shift(static_cast<int>(zx), static_cast<int>(zy), 0);
    spec.certificates.push_back(c);
    num_lcm = lcm_big(num_lcm, boost::multiprecision::numerator(c.t));
    den_gcd = gcd_big(den_gcd, boost::multiprecision::denominator(c.t));
    Vec3 vd = vec2(to_double(v[0]), to_double(v[1]));
    spec.target_values.push_back(1.0 / vd.squaredNorm());
  }
  spec.cell_size = Rational(num_lcm, den_gcd);
}

bool check_certificates(const FinslerBallSpec& spec) {
  if (spec.certificates.size() != spec.half_vertices.size()) return false;
  for (std::size_t i = 0; i < spec.half_vertices.size(); ++i) {
    const auto& c = spec.certificates[i];
    if (c.t <= 0) return false;
    if (c.t * spec.half_vertices[i][0] != Rational(c.lattice_point[0])) return false;
    if (c.t * spec.half_vertices[i][1] != Rational(c.lattice_point[1])) return false;
  }
  return true;
}

double shear_period_length(const PeriodicConstraint& phi) {
  if (phi.kind() != ConstraintKind::ShearedSine) fail(ErrorCode::InvalidArgument, "not a sheared sine constraint");
  if (phi.shear_profile() == ShearProfile::Sawtooth) {
    double s = phi.shear_amplitude();
    return std::sqrt(1.0 + s * s);
  }
  // Periodic integrand: the trapezoid rule converges spectrally.
  const int n = 4096;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double gp = phi.shear_slope(static_cast<double>(i) / n);
    sum += std::sqrt(1.0 + gp * gp);
  }
  return sum / n;
}

DegenerateConstruction build_degenerate(double k, ShearProfile profile) {
  if (!std::isfinite(k) || k < 1.0) fail(ErrorCode::InfeasibleK, "degenerate construction needs k >= 1");
  DegenerateConstruction out{PeriodicConstraint::zero(2)};
  out.k = k;
  out.profile = profile;
  double target = std::sqrt(k);
  if (profile == ShearProfile::Sawtooth) {
    out.amplitude = std::sqrt(k - 1.0);
  } else {
    double lo = 0.0, hi = target;
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (lo + hi);
      double len = shear_period_length(PeriodicConstraint::sheared_sine(ShearProfile::Sine, mid));
      (len < target ? lo : hi) = mid;
    }
    out.amplitude = 0.5 * (lo + hi);
  }
  out.phi = PeriodicConstraint::sheared_sine(profile, out.amplitude);
  out.period_length = shear_period_length(out.phi);
  return out;
}

FinslerBallSpec rationalize_ball(const PsiFunction& target, int N, double tol) {
  if (N < 2) fail(ErrorCode::InvalidArgument, "rationalization needs N >= 2");
  if (!(tol > 0.0) || tol >= 1.0) fail(ErrorCode::InvalidArgument, "tolerance must lie in (0, 1)");
  double max_den_d = std::ceil(1.0 / tol);
  if (max_den_d > 1e4) fail(ErrorCode::TolTooTight, "tolerance needs denominators beyond 1e4");
  long long max_den = static_cast<long long>(max_den_d);
  FinslerBallSpec spec;
  spec.tol = tol;
  for (int i = 0; i < N; ++i) {
    double theta = std::numbers::pi * i / N;
    Vec3 u(std::cos(theta), std::sin(theta), 0.0);
    double psi_u = target(u);
    if (!(psi_u > 0.0) || !std::isfinite(psi_u)) fail(ErrorCode::InvalidArgument, "target must be finite and positive");
    Vec3 exact = u / std::sqrt(psi_u);
    // Smallest-denominator integer direction whose boundary point is within tol/2.
    bool x_major = std::abs(u[0]) >= std::abs(u[1]);
    double ratio = x_major ? u[1] / u[0] : u[0] / u[1];
    int sgn = x_major ? (u[0] >= 0 ? 1 : -1) : (u[1] >= 0 ? 1 : -1);
    long long p = 1, q = 0;
    Vec3 dir = Vec3::Zero(), point = Vec3::Zero();
    for (long long m = 1; m <= max_den; ++m) {
      long long k = std::llround(ratio * m);
      p = m;
      q = k;
      dir = x_major ? vec2(sgn * p, sgn * q) : vec2(sgn * q, sgn * p);
      Vec3 du = dir.normalized();
      point = du / std::sqrt(target(du));
      if ((point - exact).norm() <= 0.5 * tol) break;
    }
    double len = dir.norm();
    Rational s = round_down(point.norm() / len, len, 0.5 * tol, max_den);
    if (s <= 0) fail(ErrorCode::TolTooTight, "vertex scale rounds to zero");
    spec.half_vertices.push_back({Rational(static_cast<long long>(dir[0])) * s, Rational(static_cast<long long>(dir[1])) * s});
  }
  // Coarse tolerances may round two directions together.
  std::sort(spec.half_vertices.begin(), spec.half_vertices.end());
  spec.half_vertices.erase(std::unique(spec.half_vertices.begin(), spec.half_vertices.end()), spec.half_vertices.end());
  complete_spec(spec);
  return spec;
}

FinslerBallSpec random_rational_spec(std::uint64_t seed, int N) {
  if (N < 2) fail(ErrorCode::InvalidArgument, "random spec needs N >= 2");
  std::mt19937_64 rng(seed);
  std::vector<Shift> dirs;
  for (int p = -3; p <= 3; ++p) {
    for (int q = 0; q <= 3; ++q) {
      if (q == 0 && p <= 0) continue;
      if (std::gcd(std::abs(p), q) != 1) continue;
      dirs.emplace_back(p, q, 0);
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, dirs.size() - 1);
  std::uniform_real_distribution<double> radius(0.55, 0.95);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<Shift> chosen;
    while (static_cast<int>(chosen.size()) < N) {
      Shift d = dirs[pick(rng)];
      if (std::find(chosen.begin(), chosen.end(), d) == chosen.end()) chosen.push_back(d);
    }
    FinslerBallSpec spec;
    spec.tol = 0.05;
    for (const auto& d : chosen) {
      double len = d.cast<double>().norm();
      Rational s(static_cast<long long>(std::floor(radius(rng) / len * 20.0)), 20);
      if (s <= 0) break;
      spec.half_vertices.push_back({Rational(d[0]) * s, Rational(d[1]) * s});
    }
    if (static_cast<int>(spec.half_vertices.size()) != N) continue;
    complete_spec(spec);
    // Require strictly convex position with a visible margin and spread directions.
    std::vector<Vec3> v = spec.vertices();
    std::vector<Vec3> hull = planar_hull(v, 1e-4);
    if (hull.size() != v.size()) continue;
    bool spread = true;
    for (int i = 0; i < N && spread; ++i) {
      for (int j = i + 1; j < N; ++j) {
        Vec3 a = spec.half_vertex(i).normalized(), b = spec.half_vertex(j).normalized();
        if (std::abs(a[0] * b[1] - a[1] * b[0]) < std::sin(20.0 * std::numbers::pi / 180.0)) spread = false;
      }
    }
    if (spread) return spec;
  }
  fail(ErrorCode::InvalidArgument, "could not draw a random convex spec");
}

PeriodicGraph build_network(const FinslerBallSpec& spec, WiggleShape wiggle) {
  if (!check_certificates(spec)) fail(ErrorCode::InvalidArgument, "spec certificates do not verify");
  struct Piece {
    Vec3 a, c;
    double rho;
    int line;
  };
  std::size_t n = spec.half_vertices.size();
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < n; ++i) {
    Shift di = spec.certificates[i].lattice_point;
    // Break parameters k / |det| along the closed line s * d_i, s in [0, 1).
    std::vector<std::pair<long long, long long>> breaks{{0, 1}};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      Shift dj = spec.certificates[j].lattice_point;
      long long det = std::llabs(static_cast<long long>(di[0]) * dj[1] - static_cast<long long>(di[1]) * dj[0]);
      if (det == 0) continue;
      for (long long k = 1; k < det; ++k) breaks.emplace_back(k, det);
    }
    std::sort(breaks.begin(), breaks.end(), [](const auto& x, const auto& y) {
      return x.first * y.second < y.first * x.second;
    });
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](const auto& x, const auto& y) { return x.first * y.second == y.first * x.second; }),
                 breaks.end());
    Vec3 d = di.cast<double>();
    double rho = std::sqrt(spec.target_values[i]);
    for (std::size_t b = 0; b < breaks.size(); ++b) {
      double s0 = static_cast<double>(breaks[b].first) / breaks[b].second;
      double s1 = b + 1 < breaks.size() ? static_cast<double>(breaks[b + 1].first) / breaks[b + 1].second : 1.0;
      pieces.push_back({s0 * d, s1 * d, rho, static_cast<int>(i)});
    }
  }

  // Wrap each piece so that it starts in the unit cell.
  for (auto& p : pieces) {
    Vec3 off(std::floor(p.a[0] + 1e-12), std::floor(p.a[1] + 1e-12), 0.0);
    p.a -= off;
    p.c -= off;
  }
  double max_len = 0.0;
  for (const auto& p : pieces) max_len = std::max(max_len, (p.c - p.a).norm());
  int reach = static_cast<int>(std::ceil(max_len)) + 1;

  const double margin = 0.25;
  GraphBuilder builder(2, 1e-9);
  for (std::size_t idx = 0; idx < pieces.size(); ++idx) {
    const Piece& p = pieces[idx];
    double len = (p.c - p.a).norm();
    double edge_len = len * p.rho;
    if (p.rho <= 1.0 + 1e-12) {
      builder.add_edge({p.a, p.c}, edge_len);
      continue;
    }
    Vec3 e = (p.c - p.a) / len;
    Vec3 m0 = p.a + margin * len * e, m1 = p.c - margin * len * e;
    double clearance = kInf;
    for (std::size_t o = 0; o < pieces.size(); ++o) {
      for (int sx = -reach; sx <= reach; ++sx) {
        for (int sy = -reach; sy <= reach; ++sy) {
          if (o == idx && sx == 0 && sy == 0) continue;
          Vec3 sh(sx, sy, 0.0);
          clearance = std::min(clearance, segment_distance(m0, m1, pieces[o].a + sh, pieces[o].c + sh));
        }
      }
    }
    double base = (1.0 - 2.0 * margin) * len;
    double ratio = (edge_len - 2.0 * margin * len) / base;
    int count = 1;
    while (wiggle_height(wiggle, base, ratio, count) > clearance / 3.0) {
      count *= 2;
      if (count > (1 << 16)) fail(ErrorCode::ClearanceViolation, "wiggle does not fit next to the network");
    }
    std::vector<Vec3> poly = wiggle == WiggleShape::Triangle ? triangle_wiggle(p.a, p.c, margin, ratio, count)
                                                              : arc_wiggle(p.a, p.c, margin, ratio, count);
    builder.add_edge(poly, edge_len);
  }
  PeriodicGraph g = builder.take();
  g.level = 0.0;
  g.notes.push_back("synthesized network; cell size " + rational_text(spec.cell_size));
  return g;
}

SynthesisCheck verify_synthesis(const PeriodicGraph& graph, const FinslerBallSpec& spec, int directions, double slack) {
  MetricOptions opts;
  opts.directions = directions;
  HomogenizedMetric m = assemble_metric_from_graphs({graph}, opts);
  SynthesisCheck out;
  for (const auto& d : m.directions) {
    double c = m.query(d);
    double t = spec.psi(d);
    out.directions.push_back(d);
    out.computed.push_back(c);
    out.target.push_back(t);
    double w2 = d.squaredNorm();
    out.max_relative_error = std::max(out.max_relative_error, std::abs(c - t) / w2);
    if (c < t * (1.0 - slack)) out.lower_ok = false;
  }
  for (std::size_t i = 0; i < spec.half_vertices.size(); ++i) {
    Vec3 v = spec.half_vertex(i).normalized();
    if (m.query(v) > spec.psi(v) * (1.0 + slack)) out.upper_ok = false;
  }
  return out;
}

std::string spec_to_json(const FinslerBallSpec& spec) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  j["certificates"] = nlohmann::json::array();
  for (std::size_t i = 0; i < spec.half_vertices.size(); ++i) {
    j["vertices"].push_back({rational_text(spec.half_vertices[i][0]), rational_text(spec.half_vertices[i][1])});
    if (i < spec.certificates.size()) {
      const auto& c = spec.certificates[i];
      j["certificates"].push_back({{"lattice_point", {c.lattice_point[0], c.lattice_point[1]}},
                                   {"t", rational_text(c.t)}});
    }
  }
  j["cell_size"] = rational_text(spec.cell_size);
  j["target_values"] = spec.target_values;
  j["tol"] = spec.tol;
  return j.dump(2);
}

FinslerBallSpec spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("invalid spec JSON: ") + e.what());
  }
  if (!j.contains("vertices") || !j["vertices"].is_array()) fail(ErrorCode::ConfigError, "spec needs a vertices array");
  FinslerBallSpec spec;
  for (const auto& v : j["vertices"]) {
    if (!v.is_array() || v.size() != 2) fail(ErrorCode::ConfigError, "each vertex needs two coordinates");
    spec.half_vertices.push_back({parse_rational(v[0]), parse_rational(v[1])});
  }
  spec.tol = j.value("tol", 0.0);
  // Only one of each antipodal pair is kept.
  std::vector<std::array<Rational, 2>> unique;
  for (auto v : spec.half_vertices) {
    if (v[1] < 0 || (v[1] == 0 && v[0] < 0)) v = {Rational(-v[0]), Rational(-v[1])};
    if (std::find(unique.begin(), unique.end(), v) == unique.end()) unique.push_back(v);
  }
  spec.half_vertices = unique;
  complete_spec(spec);
  if (j.contains("certificates")) {
    const auto& certs = j["certificates"];
    if (!certs.is_array()) fail(ErrorCode::ConfigError, "certificates must be an array");
    for (const auto& c : certs) {
      if (!c.contains("lattice_point") || !c.contains("t")) fail(ErrorCode::ConfigError, "bad certificate entry");
      Rational t = parse_rational(c["t"]);
      Shift z(c["lattice_point"][0].get<int>(), c["lattice_point"][1].get<int>(), 0);
      bool matched = false;
      for (const auto& v : spec.half_vertices) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          if (t * v[0] * sgn == Rational(z[0]) && t * v[1] * sgn == Rational(z[1])) matched = true;
        }
      }
      if (!matched) fail(ErrorCode::ConfigError, "certificate does not match any vertex");
    }
  }
  return spec;
}

}  // namespace oschom
