#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mmliq {

// Uniform time grid on [0, horizon] with `steps` cells; node i sits at i*h.
class Grid {
 public:
  Grid(double horizon, int steps);

  // Builds the grid from a step size. Throws DomainError unless horizon/step
  // is an integer to within 1e-12 relative.
  static Grid from_step(double horizon, double step);

  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  double step() const { return horizon_ / steps_; }
  std::size_t nodes() const { return static_cast<std::size_t>(steps_) + 1; }
  double time(std::size_t i) const { return horizon_ * static_cast<double>(i) / steps_; }

  bool operator==(const Grid&) const = default;

 private:
  double horizon_;
  int steps_;
};

// Scalar function tabulated on the nodes of a Grid.
class GridFn {
 public:
  explicit GridFn(Grid grid);
  GridFn(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

 private:
  Grid grid_;
  std::vector<double> values_;
};

// Composite trapezoid rule over the grid nodes.
double trapezoid(const GridFn& f);
double trapezoid(std::span<const double> values, double step);

// Rates on nodes: forward difference everywhere except the last node, which
// reuses the final backward difference.
GridFn forward_rate(const GridFn& q);

double sup_norm_diff(const GridFn& a, const GridFn& b);
double sup_norm(const GridFn& a);

}  // namespace mmliq
