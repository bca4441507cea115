#include "oschom/lattice.hpp"

#include <Eigen/Dense>

#include <array>

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace oschom {

LatticeBasis lattice_basis(const std::vector<Shift>& vectors, int dim) {
  std::vector<std::array<long long, 3>> rows;
  for (const auto& v : vectors) {
    if (!v.isZero()) rows.push_back({v[0], v[1], v[2]});
  }
  int pivot = 0;
  for (int col = 0; col < dim && pivot < static_cast<int>(rows.size()); ++col) {
    // Euclid on the column until a single nonzero entry remains below the pivot.
    while (true) {
      int best = -1;
      for (int r = pivot; r < static_cast<int>(rows.size()); ++r) {
        if (rows[r][col] != 0 && (best < 0 || std::llabs(rows[r][col]) < std::llabs(rows[best][col]))) best = r;
      }
      if (best < 0) break;
      std::swap(rows[pivot], rows[best]);
      bool done = true;
      for (int r = pivot + 1; r < static_cast<int>(rows.size()); ++r) {
        if (rows[r][col] == 0) continue;
        long long q = rows[r][col] / rows[pivot][col];
        for (int c = 0; c < 3; ++c) rows[r][c] -= q * rows[pivot][c];
        if (rows[r][col] != 0) done = false;
      }
      if (done) break;
    }
    if (rows[pivot][col] != 0) {
      if (rows[pivot][col] < 0) {
        for (int c = 0; c < 3; ++c) rows[pivot][c] = -rows[pivot][c];
      }
      for (int r = 0; r < pivot; ++r) {
        long long q = rows[r][col] / rows[pivot][col];
        if (rows[r][col] - q * rows[pivot][col] < 0) --q;
        for (int c = 0; c < 3; ++c) rows[r][c] -= q * rows[pivot][c];
      }
      ++pivot;
    }
  }
  LatticeBasis out;
  out.rank = pivot;
  for (int r = 0; r < pivot; ++r) {
    out.generators.emplace_back(static_cast<int>(rows[r][0]), static_cast<int>(rows[r][1]),
                                static_cast<int>(rows[r][2]));
  }
  return out;
}

bool in_real_span(const LatticeBasis& basis, const Vec3& w, double tol) {
  double norm = w.norm();
  if (norm == 0.0) return true;
  if (basis.rank == 0) return false;
  Eigen::MatrixXd b(3, basis.rank);
  for (int i = 0; i < basis.rank; ++i) b.col(i) = basis.generators[i].cast<double>();
  Eigen::VectorXd coef = b.colPivHouseholderQr().solve(w);
  return (b * coef - w).norm() <= tol * norm;
}

}  // namespace oschom
