#pragma once

#include "oschom/types.hpp"

#include <vector>

namespace oschom {

// Integer sub-lattice of Z^m generated by a set of vectors.
struct LatticeBasis {
  int rank = 0;
  std::vector<Shift> generators;  // row-echelon (Hermite) basis
};

LatticeBasis lattice_basis(const std::vector<Shift>& vectors, int dim);

// True when w lies in the real span of the basis, up to a relative tolerance.
bool in_real_span(const LatticeBasis& basis, const Vec3& w, double tol = 1e-9);

}  // namespace oschom
