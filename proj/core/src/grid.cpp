#include "mmliq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmliq/errors.hpp"

namespace mmliq {

Grid::Grid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("grid horizon must be positive and finite");
  }
  if (steps < 1) throw DomainError("grid needs at least one step");
}

Grid Grid::from_step(double horizon, double step) {
  if (!(step > 0.0)) throw DomainError("grid step must be positive");
  const double ratio = horizon / step;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-12 * rounded) {
    throw DomainError("grid step " + std::to_string(step) + " does not divide horizon " +
                      std::to_string(horizon));
  }
  return Grid(horizon, static_cast<int>(rounded));
}

GridFn::GridFn(Grid grid) : grid_(grid), values_(grid.nodes(), 0.0) {}

GridFn::GridFn(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.nodes()) {
    throw GridMismatch("GridFn length " + std::to_string(values_.size()) + " != " +
                       std::to_string(grid_.nodes()) + " nodes");
  }
}

double trapezoid(std::span<const double> values, double step) {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * step;
}

double trapezoid(const GridFn& f) { return trapezoid(f.values(), f.grid().step()); }

GridFn forward_rate(const GridFn& q) {
  GridFn v(q.grid());
  const double h = q.grid().step();
  const std::size_t n = q.size();
  for (std::size_t i = 0; i + 1 < n; ++i) v[i] = (q[i + 1] - q[i]) / h;
  v[n - 1] = (q[n - 1] - q[n - 2]) / h;
  return v;
}

double sup_norm_diff(const GridFn& a, const GridFn& b) {
  if (a.size() != b.size()) throw GridMismatch("sup_norm_diff on different grids");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double sup_norm(const GridFn& a) {
  double m = 0.0;
  for (double x : a.values()) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace mmliq
