#include "mmliq/block_tridiagonal.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "mmliq/errors.hpp"

namespace mmliq {

BlockTridiagonalSolver::BlockTridiagonalSolver(const Block& lower, const Block& diag,
                                               const Block& upper, int steps)
    : lower_(lower), upper_(upper), steps_(steps) {
  if (steps < 2) throw SingularSystem("block system needs at least one interior node");
  const auto interior = static_cast<std::size_t>(steps);
  pivot_inverse_.resize(interior);
  sweep_.resize(interior);
  Block previous = Block::Zero();
  for (std::size_t j = 1; j < interior; ++j) {
    const Block pivot = diag - lower * previous;
    const double scale = pivot.cwiseAbs().maxCoeff();
    const double det = pivot.determinant();
    if (!(scale > 0.0) || !(std::abs(det) > 1e-13 * scale * scale)) {
      throw SingularSystem("singular pivot block at node " + std::to_string(j));
    }
    pivot_inverse_[j] = pivot.inverse();
    sweep_[j] = pivot_inverse_[j] * upper;
    previous = sweep_[j];
  }
}

std::vector<BlockTridiagonalSolver::Vec> BlockTridiagonalSolver::solve(const std::vector<Vec>& rhs,
                                                                       const Vec& first,
                                                                       const Vec& last) const {
  const auto n = static_cast<std::size_t>(steps_);
  std::vector<Vec> x(n + 1, Vec::Zero());
  x[0] = first;
  x[n] = last;
  std::vector<Vec> reduced(n, Vec::Zero());
  for (std::size_t j = 1; j < n; ++j) {
    Vec r = rhs[j];
    if (j == 1) r -= lower_ * first;
    if (j == n - 1) r -= upper_ * last;
    if (j > 1) r -= lower_ * reduced[j - 1];
    reduced[j] = pivot_inverse_[j] * r;
  }
  x[n - 1] = reduced[n - 1];
  for (std::size_t j = n - 1; j-- > 1;) x[j] = reduced[j] - sweep_[j] * x[j + 1];
  return x;
}

}  // namespace mmliq
