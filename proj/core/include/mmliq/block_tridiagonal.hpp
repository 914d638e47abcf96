#pragma once

#include <vector>

#include <Eigen/Core>

namespace mmliq {

// Direct solver for the constant-coefficient 2x2-block tridiagonal system
//   lower * x[j-1] + diag * x[j] + upper * x[j+1] = rhs[j],  j = 1..n-1,
// with x[0] and x[n] prescribed. The block LU factors are computed once so the
// same operator can be re-solved for many right-hand sides.
class BlockTridiagonalSolver {
 public:
  using Block = Eigen::Matrix2d;
  using Vec = Eigen::Vector2d;

  // Throws SingularSystem when a pivot block is numerically singular.
  BlockTridiagonalSolver(const Block& lower, const Block& diag, const Block& upper, int steps);

  // rhs has steps+1 entries; entries 0 and steps are ignored. Returns all
  // steps+1 states with the boundary values in place.
  std::vector<Vec> solve(const std::vector<Vec>& rhs, const Vec& first, const Vec& last) const;

  int steps() const { return steps_; }

 private:
  Block lower_;
  Block upper_;
  int steps_;
  std::vector<Block> pivot_inverse_;  // (diag - lower * c[j-1])^{-1}
  std::vector<Block> sweep_;          // c[j] = pivot_inverse * upper
};

}  // namespace mmliq
