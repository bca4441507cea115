#pragma once

#include "oschom/types.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace oschom {

struct PeriodicGraph;

enum class ConstraintKind {
  Zero,
  SinProduct,
  DistToLattice2D,
  FaceNetwork3D,
  DistToLattice3D,
  ShearedSine,
  SynthNetwork,
  GridSampled,
};

enum class ShearProfile { Sawtooth, Sine };

// A Z^m-periodic scalar field phi on R^m, m in {2, 3}.
class PeriodicConstraint {
 public:
  static PeriodicConstraint zero(int dim);
  static PeriodicConstraint sin_product();
  static PeriodicConstraint dist_to_lattice_2d();
  static PeriodicConstraint face_network_3d();
  static PeriodicConstraint dist_to_lattice_3d();
  // phi(x, y) = sin(2 pi (x - g(y))); `amplitude` is |g'| for the sawtooth and
  // the sine amplitude A in g(y) = A sin(2 pi y) for the sine profile.
  static PeriodicConstraint sheared_sine(ShearProfile profile, double amplitude);
  // Squared distance to the edge polylines of a periodic network.
  static PeriodicConstraint synth_network(std::shared_ptr<const PeriodicGraph> network);
  // Periodic multilinear interpolation of node values on a res^m grid;
  // values are indexed x-fastest.
  static PeriodicConstraint grid_sampled(int dim, int resolution, std::vector<double> values);
  static PeriodicConstraint load_grid_file(const std::string& path);

  int dim() const { return dim_; }
  ConstraintKind kind() const { return kind_; }
  std::string_view id() const;
  double lipschitz_estimate() const { return lipschitz_; }
  bool analytic_gradient() const;
  bool has_analytic_hessian() const;

  double value(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  Mat3 hessian(const Vec3& x) const;

  // Shear profile access (ShearedSine only).
  ShearProfile shear_profile() const { return profile_; }
  double shear_amplitude() const { return amplitude_; }
  double shear_offset(double y) const;
  double shear_slope(double y) const;

  const PeriodicGraph* network() const { return network_.get(); }
  int grid_resolution() const { return resolution_; }
  const std::vector<double>& grid_values() const { return grid_; }

 private:
  PeriodicConstraint(int dim, ConstraintKind kind) : dim_(dim), kind_(kind) {}

  double grid_value(const Vec3& x) const;
  double network_value(const Vec3& x) const;
  Vec3 finite_difference_gradient(const Vec3& x) const;

  struct Segment {
    Vec3 a;
    Vec3 b;
  };

  int dim_ = 2;
  ConstraintKind kind_ = ConstraintKind::Zero;
  double lipschitz_ = 0.0;
  ShearProfile profile_ = ShearProfile::Sawtooth;
  double amplitude_ = 0.0;
  int resolution_ = 0;
  std::vector<double> grid_;
  std::shared_ptr<const PeriodicGraph> network_;
  std::shared_ptr<const std::vector<Segment>> segments_;
};

PeriodicConstraint make_constraint(std::string_view id);
ConstraintKind constraint_kind_from_id(std::string_view id);

double eval_constraint(const PeriodicConstraint& phi, const Vec3& x);
Vec3 grad_constraint(const PeriodicConstraint& phi, const Vec3& x);

// Min and max of phi over the node-aligned grid {i / resolution}^m.
Interval image_range(const PeriodicConstraint& phi, int resolution);

}  // namespace oschom
