#include "oschom/constraint.hpp"

#include "oschom/error.hpp"
#include "oschom/periodic_graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>

namespace oschom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFdStep = 1e-6;

// Signed offset to the nearest integer; exact half-integers resolve to the
// smaller integer so the result is +0.5.
double offset_to_integer(double t) {
  double f = t - std::floor(t);
  return f <= 0.5 ? f : f - 1.0;
}

double sawtooth_slope(double y, double s) {
  double f = y - std::floor(y);
  return (f > 0.0 && f <= 0.5) ? s : -s;
}

double segment_dist2(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 ab = b - a;
  double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).squaredNorm();
}

}  // namespace

PeriodicConstraint PeriodicConstraint::zero(int dim) {
  if (dim != 2 && dim != 3) fail(ErrorCode::InvalidArgument, "dimension must be 2 or 3");
  return PeriodicConstraint(dim, ConstraintKind::Zero);
}

PeriodicConstraint PeriodicConstraint::sin_product() {
  PeriodicConstraint c(2, ConstraintKind::SinProduct);
  c.lipschitz_ = kTwoPi;
  return c;
}

PeriodicConstraint PeriodicConstraint::dist_to_lattice_2d() {
  PeriodicConstraint c(2, ConstraintKind::DistToLattice2D);
  c.lipschitz_ = 1.0;
  return c;
}

PeriodicConstraint PeriodicConstraint::face_network_3d() {
  PeriodicConstraint c(3, ConstraintKind::FaceNetwork3D);
  c.lipschitz_ = 1.0;
  return c;
}

PeriodicConstraint PeriodicConstraint::dist_to_lattice_3d() {
  PeriodicConstraint c(3, ConstraintKind::DistToLattice3D);
  c.lipschitz_ = std::sqrt(3.0);
  return c;
}

PeriodicConstraint PeriodicConstraint::sheared_sine(ShearProfile profile, double amplitude) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    fail(ErrorCode::InvalidArgument, "shear amplitude must be finite and non-negative");
  }
  PeriodicConstraint c(2, ConstraintKind::ShearedSine);
  c.profile_ = profile;
  c.amplitude_ = amplitude;
  double max_slope = profile == ShearProfile::Sawtooth ? amplitude : kTwoPi * amplitude;
  c.lipschitz_ = kTwoPi * std::sqrt(1.0 + max_slope * max_slope);
  return c;
}

PeriodicConstraint PeriodicConstraint::synth_network(std::shared_ptr<const PeriodicGraph> network) {
  if (!network) fail(ErrorCode::InvalidArgument, "null network");
  PeriodicConstraint c(network->dim, ConstraintKind::SynthNetwork);
  auto segs = std::make_shared<std::vector<Segment>>();
  for (const auto& e : network->edges) {
    for (std::size_t i = 0; i + 1 < e.polyline.size(); ++i) {
      segs->push_back({e.polyline[i], e.polyline[i + 1]});
    }
  }
  c.network_ = std::move(network);
  c.segments_ = std::move(segs);
  // |grad d^2| = 2 d and d never exceeds half the cell diagonal.
  c.lipschitz_ = std::sqrt(static_cast<double>(c.dim_));
  return c;
}

PeriodicConstraint PeriodicConstraint::grid_sampled(int dim, int resolution, std::vector<double> values) {
  if (dim != 2 && dim != 3) fail(ErrorCode::InvalidArgument, "grid dimension must be 2 or 3");
  if (resolution < 2) fail(ErrorCode::InvalidArgument, "grid resolution must be at least 2");
  std::size_t expected = 1;
  for (int i = 0; i < dim; ++i) expected *= static_cast<std::size_t>(resolution);
  if (values.size() != expected) {
    fail(ErrorCode::InvalidArgument, "grid has " + std::to_string(values.size()) + " values, expected " +
                                         std::to_string(expected));
  }
  PeriodicConstraint c(dim, ConstraintKind::GridSampled);
  c.resolution_ = resolution;
  c.grid_ = std::move(values);
  double max_step = 0.0;
  int n = resolution;
  auto at = [&](int i, int j, int k) {
    return c.grid_[static_cast<std::size_t>(((k % n) * n + (j % n)) * n + (i % n))];
  };
  int nk = dim == 3 ? n : 1;
  for (int k = 0; k < nk; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        double v = at(i, j, k);
        max_step = std::max(max_step, std::abs(at(i + 1, j, k) - v));
        max_step = std::max(max_step, std::abs(at(i, j + 1, k) - v));
        if (dim == 3) max_step = std::max(max_step, std::abs(at(i, j, k + 1) - v));
      }
    }
  }
  c.lipschitz_ = max_step * n * std::sqrt(static_cast<double>(dim));
  return c;
}

PeriodicConstraint PeriodicConstraint::load_grid_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open grid file " + path);
  bool text = path.size() >= 4 &&
              (path.compare(path.size() - 4, 4, ".csv") == 0 || path.compare(path.size() - 4, 4, ".txt") == 0);
  int dim = 0;
  int res = 0;
  std::vector<double> values;
  if (text) {
    std::stringstream ss;
    ss << in.rdbuf();
    std::string content = ss.str();
    std::replace(content.begin(), content.end(), ',', ' ');
    std::istringstream tokens(content);
    if (!(tokens >> dim >> res)) fail(ErrorCode::IoError, "grid CSV header must be 'm,resolution'");
    double v = 0.0;
    while (tokens >> v) values.push_back(v);
  } else {
    std::int32_t header[2] = {0, 0};
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in) fail(ErrorCode::IoError, "truncated grid header in " + path);
    dim = header[0];
    res = header[1];
    if (dim < 2 || dim > 3 || res < 2 || res > 4096) fail(ErrorCode::IoError, "bad grid header in " + path);
    std::size_t count = static_cast<std::size_t>(res) * res * (dim == 3 ? res : 1);
    values.resize(count);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) fail(ErrorCode::IoError, "truncated grid data in " + path);
  }
  return grid_sampled(dim, res, std::move(values));
}

std::string_view PeriodicConstraint::id() const {
  switch (kind_) {
    case ConstraintKind::Zero: return dim_ == 3 ? "zero-3d" : "zero";
    case ConstraintKind::SinProduct: return "sin-product";
    case ConstraintKind::DistToLattice2D: return "dist-z2";
    case ConstraintKind::FaceNetwork3D: return "face-network-3d";
    case ConstraintKind::DistToLattice3D: return "dist-z3";
    case ConstraintKind::ShearedSine: return "sheared-sine";
    case ConstraintKind::SynthNetwork: return "synth-network";
    case ConstraintKind::GridSampled: return "grid-sampled";
  }
  return "unknown";
}

bool PeriodicConstraint::analytic_gradient() const {
  return kind_ != ConstraintKind::SynthNetwork && kind_ != ConstraintKind::GridSampled;
}

bool PeriodicConstraint::has_analytic_hessian() const { return analytic_gradient(); }

double PeriodicConstraint::shear_offset(double y) const {
  if (profile_ == ShearProfile::Sawtooth) return amplitude_ * std::abs(offset_to_integer(y));
  return amplitude_ * std::sin(kTwoPi * y);
}

double PeriodicConstraint::shear_slope(double y) const {
  if (profile_ == ShearProfile::Sawtooth) return sawtooth_slope(y, amplitude_);
  return amplitude_ * kTwoPi * std::cos(kTwoPi * y);
}

double PeriodicConstraint::value(const Vec3& x) const {
  switch (kind_) {
    case ConstraintKind::Zero: return 0.0;
    case ConstraintKind::SinProduct: return std::sin(kTwoPi * x[0]) * std::sin(kTwoPi * x[1]);
    case ConstraintKind::DistToLattice2D: {
      double dx = offset_to_integer(x[0]);
      double dy = offset_to_integer(x[1]);
      return std::hypot(dx, dy);
    }
    case ConstraintKind::FaceNetwork3D: {
      double best = kInf;
      for (int i = 0; i < 3; ++i) {
        double d = offset_to_integer(x[i]);
        best = std::min(best, d * d);
      }
      return best;
    }
    case ConstraintKind::DistToLattice3D: {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) {
        double d = offset_to_integer(x[i]);
        s += d * d;
      }
      return s;
    }
    case ConstraintKind::ShearedSine: return std::sin(kTwoPi * (x[0] - shear_offset(x[1])));
    case ConstraintKind::SynthNetwork: return network_value(x);
    case ConstraintKind::GridSampled: return grid_value(x);
  }
  return 0.0;
}

Vec3 PeriodicConstraint::gradient(const Vec3& x) const {
  Vec3 g = Vec3::Zero();
  switch (kind_) {
    case ConstraintKind::Zero: break;
    case ConstraintKind::SinProduct: {
      double sx = std::sin(kTwoPi * x[0]), cx = std::cos(kTwoPi * x[0]);
      double sy = std::sin(kTwoPi * x[1]), cy = std::cos(kTwoPi * x[1]);
      g = Vec3(kTwoPi * cx * sy, kTwoPi * sx * cy, 0.0);
      break;
    }
    case ConstraintKind::DistToLattice2D: {
      Vec3 d(offset_to_integer(x[0]), offset_to_integer(x[1]), 0.0);
      double r = d.norm();
      if (r > 0.0) g = d / r;
      break;
    }
    case ConstraintKind::FaceNetwork3D: {
      int arg = 0;
      double best = kInf;
      for (int i = 0; i < 3; ++i) {
        double d = offset_to_integer(x[i]);
        if (d * d < best) {
          best = d * d;
          arg = i;
        }
      }
      g[arg] = 2.0 * offset_to_integer(x[arg]);
      break;
    }
    case ConstraintKind::DistToLattice3D:
      for (int i = 0; i < 3; ++i) g[i] = 2.0 * offset_to_integer(x[i]);
      break;
    case ConstraintKind::ShearedSine: {
      double c = kTwoPi * std::cos(kTwoPi * (x[0] - shear_offset(x[1])));
      g = Vec3(c, -c * shear_slope(x[1]), 0.0);
      break;
    }
    case ConstraintKind::SynthNetwork:
    case ConstraintKind::GridSampled: g = finite_difference_gradient(x); break;
  }
  return g;
}

Mat3 PeriodicConstraint::hessian(const Vec3& x) const {
  Mat3 h = Mat3::Zero();
  switch (kind_) {
    case ConstraintKind::Zero: break;
    case ConstraintKind::SinProduct: {
      double sx = std::sin(kTwoPi * x[0]), cx = std::cos(kTwoPi * x[0]);
      double sy = std::sin(kTwoPi * x[1]), cy = std::cos(kTwoPi * x[1]);
      double k = kTwoPi * kTwoPi;
      h(0, 0) = -k * sx * sy;
      h(1, 1) = -k * sx * sy;
      h(0, 1) = h(1, 0) = k * cx * cy;
      break;
    }
    case ConstraintKind::DistToLattice2D: {
      Vec3 d(offset_to_integer(x[0]), offset_to_integer(x[1]), 0.0);
      double r = d.norm();
      if (r > 0.0) {
        Vec3 n = d / r;
        Mat3 p = Mat3::Zero();
        p(0, 0) = p(1, 1) = 1.0;
        h = (p - n * n.transpose()) / r;
      }
      break;
    }
    case ConstraintKind::FaceNetwork3D: {
      int arg = 0;
      double best = kInf;
      for (int i = 0; i < 3; ++i) {
        double d = offset_to_integer(x[i]);
        if (d * d < best) {
          best = d * d;
          arg = i;
        }
      }
      h(arg, arg) = 2.0;
      break;
    }
    case ConstraintKind::DistToLattice3D: h = 2.0 * Mat3::Identity(); break;
    case ConstraintKind::ShearedSine: {
      double u = kTwoPi * (x[0] - shear_offset(x[1]));
      double s = std::sin(u), c = std::cos(u);
      double gp = shear_slope(x[1]);
      double gpp = profile_ == ShearProfile::Sine ? -kTwoPi * kTwoPi * amplitude_ * std::sin(kTwoPi * x[1]) : 0.0;
      double k = kTwoPi * kTwoPi;
      h(0, 0) = -k * s;
      h(0, 1) = h(1, 0) = k * s * gp;
      h(1, 1) = -k * s * gp * gp - kTwoPi * c * gpp;
      break;
    }
    case ConstraintKind::SynthNetwork:
    case ConstraintKind::GridSampled: {
      double step = 1e-4;
      for (int i = 0; i < dim_; ++i) {
        Vec3 e = Vec3::Zero();
        e[i] = step;
        h.col(i) = (gradient(x + e) - gradient(x - e)) / (2.0 * step);
      }
      h = 0.5 * (h + h.transpose()).eval();
      break;
    }
  }
  return h;
}

Vec3 PeriodicConstraint::finite_difference_gradient(const Vec3& x) const {
  Vec3 g = Vec3::Zero();
  for (int i = 0; i < dim_; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = kFdStep;
    g[i] = (value(x + e) - value(x - e)) / (2.0 * kFdStep);
  }
  return g;
}

double PeriodicConstraint::grid_value(const Vec3& x) const {
  int n = resolution_;
  int idx[3][2];
  double frac[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) {
    double t = x[a] * n;
    double fl = std::floor(t);
    frac[a] = t - fl;
    long long i0 = static_cast<long long>(fl) % n;
    if (i0 < 0) i0 += n;
    idx[a][0] = static_cast<int>(i0);
    idx[a][1] = static_cast<int>((i0 + 1) % n);
  }
  double result = 0.0;
  int corners = 1 << dim_;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t lin = 0;
    std::size_t stride = 1;
    for (int a = 0; a < dim_; ++a) {
      int bit = (c >> a) & 1;
      w *= bit ? frac[a] : 1.0 - frac[a];
      lin += static_cast<std::size_t>(idx[a][bit]) * stride;
      stride *= static_cast<std::size_t>(n);
    }
    result += w * grid_[lin];
  }
  return result;
}

double PeriodicConstraint::network_value(const Vec3& x) const {
  Vec3 p = wrap_unit(x, dim_);
  double best = kInf;
  int kz = dim_ == 3 ? 1 : 0;
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      for (int k = -kz; k <= kz; ++k) {
        Vec3 q = p + Vec3(i, j, k);
        for (const auto& s : *segments_) best = std::min(best, segment_dist2(q, s.a, s.b));
      }
    }
  }
  return best;
}

ConstraintKind constraint_kind_from_id(std::string_view id) {
  if (id == "zero" || id == "zero-3d") return ConstraintKind::Zero;
  if (id == "sin-product") return ConstraintKind::SinProduct;
  if (id == "dist-z2") return ConstraintKind::DistToLattice2D;
  if (id == "face-network-3d") return ConstraintKind::FaceNetwork3D;
  if (id == "dist-z3") return ConstraintKind::DistToLattice3D;
  if (id == "sheared-sine") return ConstraintKind::ShearedSine;
  if (id == "synth-network") return ConstraintKind::SynthNetwork;
  if (id == "grid-sampled") return ConstraintKind::GridSampled;
  fail(ErrorCode::UnsupportedKind, "unknown constraint id '" + std::string(id) + "'");
}

PeriodicConstraint make_constraint(std::string_view id) {
  switch (constraint_kind_from_id(id)) {
    case ConstraintKind::Zero: return PeriodicConstraint::zero(id == "zero-3d" ? 3 : 2);
    case ConstraintKind::SinProduct: return PeriodicConstraint::sin_product();
    case ConstraintKind::DistToLattice2D: return PeriodicConstraint::dist_to_lattice_2d();
    case ConstraintKind::FaceNetwork3D: return PeriodicConstraint::face_network_3d();
    case ConstraintKind::DistToLattice3D: return PeriodicConstraint::dist_to_lattice_3d();
    case ConstraintKind::ShearedSine: return PeriodicConstraint::sheared_sine(ShearProfile::Sawtooth, std::sqrt(3.0));
    case ConstraintKind::SynthNetwork:
    case ConstraintKind::GridSampled: break;
  }
  fail(ErrorCode::UnsupportedKind, "constraint '" + std::string(id) + "' needs an input file");
}

double eval_constraint(const PeriodicConstraint& phi, const Vec3& x) { return phi.value(x); }

Vec3 grad_constraint(const PeriodicConstraint& phi, const Vec3& x) { return phi.gradient(x); }

Interval image_range(const PeriodicConstraint& phi, int resolution) {
  if (resolution < 8) fail(ErrorCode::InvalidArgument, "image_range needs resolution >= 8");
  Interval out{kInf, -kInf};
  int nk = phi.dim() == 3 ? resolution : 1;
  double h = 1.0 / resolution;
  for (int k = 0; k < nk; ++k) {
    for (int j = 0; j < resolution; ++j) {
      for (int i = 0; i < resolution; ++i) {
        double v = phi.value(Vec3(i * h, j * h, k * h));
        out.lo = std::min(out.lo, v);
        out.hi = std::max(out.hi, v);
      }
    }
  }
  return out;
}

}  // namespace oschom
