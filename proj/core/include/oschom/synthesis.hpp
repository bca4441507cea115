#pragma once

#include "oschom/constraint.hpp"
#include "oschom/levelset.hpp"
#include "oschom/periodic_graph.hpp"
#include "oschom/types.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace oschom {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct RationalCertificate {
  Shift lattice_point = Shift::Zero();  // z_i in Z^2
  Rational t;                           // t_i V_i = z_i exactly
};

// Symmetric polygon conv{+-V_i} with rational vertices; V_i are listed with
// polar angle in [0, pi).
struct FinslerBallSpec {
  std::vector<std::array<Rational, 2>> half_vertices;
  std::vector<RationalCertificate> certificates;
  Rational cell_size;               // lcm of the t_i
  std::vector<double> target_values;  // psi(nu_i) = 1 / |V_i|^2
  double tol = 0.0;

  std::vector<Vec3> vertices() const;  // all 2N vertices, counter-clockwise
  Vec3 half_vertex(std::size_t i) const;
  // Squared gauge of the polygon.
  double psi(const Vec3& w) const;
};

// Fills certificates, cell size and target values from half_vertices.
void complete_spec(FinslerBallSpec& spec);
bool check_certificates(const FinslerBallSpec& spec);

struct DegenerateConstruction {
  PeriodicConstraint phi;
  double k = 1.0;
  ShearProfile profile = ShearProfile::Sawtooth;
  double amplitude = 0.0;
  Vec3 finite_direction = vec2(0.0, 1.0);
  // Curve length per vertical period, sqrt(k) by construction.
  double period_length = 1.0;
};

DegenerateConstruction build_degenerate(double k, ShearProfile profile = ShearProfile::Sawtooth);
double shear_period_length(const PeriodicConstraint& phi);

using PsiFunction = std::function<double(const Vec3&)>;

FinslerBallSpec rationalize_ball(const PsiFunction& target, int N, double tol);

// Seeded random symmetric 2N-gon inside the unit disc with small rational data.
FinslerBallSpec random_rational_spec(std::uint64_t seed, int N = 3);

PeriodicGraph build_network(const FinslerBallSpec& spec, WiggleShape wiggle = WiggleShape::Triangle);

struct SynthesisCheck {
  double max_relative_error = 0.0;  // max |psi_computed - psi_target| / |w|^2
  bool upper_ok = true;             // computed <= target + slack at vertex directions
  bool lower_ok = true;             // computed >= target - slack everywhere
  std::vector<Vec3> directions;
  std::vector<double> computed;
  std::vector<double> target;
};

SynthesisCheck verify_synthesis(const PeriodicGraph& graph, const FinslerBallSpec& spec, int directions,
                                double slack = 0.05);

std::string spec_to_json(const FinslerBallSpec& spec);
FinslerBallSpec spec_from_json(const std::string& text);

}  // namespace oschom
