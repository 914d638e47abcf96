#include "mmliq/fdsolver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "mmliq/block_tridiagonal.hpp"
#include "mmliq/errors.hpp"
#include "mmliq/expm.hpp"

namespace mmliq {

namespace {

using Vec = BlockTridiagonalSolver::Vec;
using Block = BlockTridiagonalSolver::Block;

BlockTridiagonalSolver stencil_operator(const MarketParams& p, const Grid& grid) {
  const double h = grid.step();
  const double h2 = h * h;
  const double a0 = p.major_temp_impact;
  const double a = p.minor_temp_impact;
  const double l0 = p.major_perm_impact;
  const double l = p.minor_perm_impact;
  Block lower;
  lower << a0 / h2, 0.0, 0.0, a / h2;
  Block diag;
  diag << -2.0 * a0 / h2 - p.major_risk_aversion, -l / (2.0 * h),
      -l0 / (2.0 * h), -2.0 * a / h2 - p.minor_risk_aversion - l / (2.0 * h);
  Block upper;
  upper << a0 / h2, l / (2.0 * h), l0 / (2.0 * h), a / h2 + l / (2.0 * h);
  return BlockTridiagonalSolver(lower, diag, upper, grid.steps());
}

std::pair<GridFn, GridFn> split(const Grid& grid, const std::vector<Vec>& x) {
  GridFn major(grid);
  GridFn minor(grid);
  for (std::size_t i = 0; i < x.size(); ++i) {
    major[i] = x[i](0);
    minor[i] = x[i](1);
  }
  return {std::move(major), std::move(minor)};
}

EquilibriumSolution with_rates(GridFn q_major, GridFn q_minor) {
  GridFn v_major = forward_rate(q_major);
  GridFn v_minor = forward_rate(q_minor);
  return {std::move(q_major), std::move(q_minor), std::move(v_major), std::move(v_minor)};
}

}  // namespace

void SolveOptions::validate() const {
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
  if (!(tol > 0.0) || !std::isfinite(tol)) throw DomainError("tol must be > 0");
  if (oracle_quadrature_steps < 1) throw DomainError("oracle_quadrature_steps must be >= 1");
  if (!std::isfinite(start_major) || !std::isfinite(start_minor)) {
    throw DomainError("periodic start values must be finite");
  }
}

EquilibriumSolution solve_equilibrium(const MarketParams& params, const Inventories& inv,
                                      const TargetStrategy& target, const Grid& grid) {
  params.validate();
  const GridFn r = sample_inventory(target, grid);
  const auto solver = stencil_operator(params, grid);
  std::vector<Vec> rhs(grid.nodes(), Vec::Zero());
  for (std::size_t j = 1; j + 1 < grid.nodes(); ++j) rhs[j](0) = -params.major_risk_aversion * r[j];
  const auto x = solver.solve(rhs, Vec(inv.major, inv.minor), Vec(0.0, 0.0));
  auto [major, minor] = split(grid, x);
  return with_rates(std::move(major), std::move(minor));
}

EquilibriumSolution solve_no_interaction(const MarketParams& params, const Inventories& inv,
                                         const TargetStrategy& target, const Grid& grid) {
  MarketParams deaf_major = params;
  deaf_major.minor_perm_impact = 0.0;
  MarketParams deaf_minor = params;
  deaf_minor.major_perm_impact = 0.0;
  EquilibriumSolution major = solve_equilibrium(deaf_major, inv, target, grid);
  EquilibriumSolution minor = solve_equilibrium(deaf_minor, inv, target, grid);
  return {std::move(major.q_major), std::move(minor.q_minor), std::move(major.v_major),
          std::move(minor.v_minor)};
}

StencilResidual equilibrium_residual(const MarketParams& p, const GridFn& target_samples,
                                     const EquilibriumSolution& sol) {
  const Grid& grid = sol.q_major.grid();
  if (!(target_samples.grid() == grid) || !(sol.q_minor.grid() == grid)) {
    throw GridMismatch("residual check needs matching grids");
  }
  const double h = grid.step();
  const auto& z = sol.q_major;
  const auto& w = sol.q_minor;
  StencilResidual out;
  for (std::size_t j = 1; j + 1 < grid.nodes(); ++j) {
    const double dz = (z[j + 1] - z[j]) / h;
    const double dw = (w[j + 1] - w[j]) / h;
    const double major = p.major_temp_impact * (z[j + 1] - 2.0 * z[j] + z[j - 1]) / (h * h) -
                         p.major_risk_aversion * z[j] + 0.5 * p.minor_perm_impact * dw +
                         p.major_risk_aversion * target_samples[j];
    const double minor = p.minor_temp_impact * (w[j + 1] - 2.0 * w[j] + w[j - 1]) / (h * h) -
                         p.minor_risk_aversion * w[j] + 0.5 * p.major_perm_impact * dz +
                         0.5 * p.minor_perm_impact * dw;
    out.major = std::max(out.major, std::abs(major));
    out.minor = std::max(out.minor, std::abs(minor));
  }
  return out;
}

PeriodicSolution solve_periodic(const MarketParams& params, const PeriodicResidual& residual,
                                const Grid& period_grid, const SolveOptions& opts) {
  params.validate();
  opts.validate();
  if (std::abs(period_grid.horizon() - residual.period()) > 1e-12 * residual.period()) {
    throw GridMismatch("period grid must span exactly one period");
  }
  const int per = period_grid.steps();
  const int window_periods = std::max(2, residual.periods());
  const Grid window(period_grid.horizon() * window_periods, per * window_periods);
  const auto solver = stencil_operator(params, window);

  std::vector<Vec> rhs(window.nodes(), Vec::Zero());
  for (std::size_t j = 1; j + 1 < window.nodes(); ++j) {
    rhs[j](0) = -params.major_risk_aversion *
                residual.at_lattice(static_cast<long long>(j), static_cast<long long>(per));
  }

  Vec start(opts.start_major, opts.start_minor);
  std::vector<Vec> x;
  double update = 0.0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    x = solver.solve(rhs, start, start);
    const Vec next = 0.5 * (start + x[static_cast<std::size_t>(per)]);
    update = (next - start).cwiseAbs().maxCoeff();
    start = next;
    if (update < opts.tol) {
      x = solver.solve(rhs, start, start);
      x.resize(static_cast<std::size_t>(per) + 1);
      x.back() = start;  // exact periodic closure
      auto [major, minor] = split(period_grid, x);
      return {std::move(major), std::move(minor), start(0), start(1), it};
    }
  }
  throw NonConvergence("periodic relaxation did not converge in " + std::to_string(opts.max_iter) +
                           " sweeps; last update " + std::to_string(update),
                       update);
}

TrendSolution solve_trend(const MarketParams& params, const Inventories& inv,
                          double periodic_major_initial, double periodic_minor_initial,
                          const Grid& grid) {
  params.validate();
  const auto solver = stencil_operator(params, grid);
  std::vector<Vec> rhs(grid.nodes(), Vec::Zero());
  // The D-TWAP line contributes a constant forward difference -q0/T to the
  // minor equation; it is moved to the right-hand side here.
  const double source = 0.5 * params.major_perm_impact * inv.major / grid.horizon();
  for (std::size_t j = 1; j + 1 < grid.nodes(); ++j) rhs[j](1) = source;
  const auto x = solver.solve(rhs, Vec(-periodic_major_initial, inv.minor - periodic_minor_initial),
                              Vec(-periodic_major_initial, -periodic_minor_initial));
  auto [major, minor] = split(grid, x);
  return {std::move(major), std::move(minor)};
}

PeriodicOracle::PeriodicOracle(const MarketParams& p, PeriodicResidual residual,
                               const SolveOptions& opts)
    : residual_(std::move(residual)),
      forcing_scale_(-p.major_risk_aversion / p.major_temp_impact),
      quadrature_steps_(opts.oracle_quadrature_steps) {
  p.validate();
  opts.validate();
  const double a0 = p.major_temp_impact;
  const double a = p.minor_temp_impact;
  system_ << 0.0, 0.0, 1.0, 0.0,
      0.0, 0.0, 0.0, 1.0,
      p.major_risk_aversion / a0, 0.0, 0.0, -p.minor_perm_impact / (2.0 * a0),
      0.0, p.minor_risk_aversion / a, -p.major_perm_impact / (2.0 * a), -p.minor_perm_impact / (2.0 * a);
  const Eigen::Matrix4d gap =
      Eigen::Matrix4d::Identity() - expm(Eigen::Matrix4d(system_ * residual_.period()));
  Eigen::PartialPivLU<Eigen::Matrix4d> lu(gap);
  if (!(lu.rcond() > 1e-14)) throw SingularMatrix("I - exp(A tau) is numerically singular");
  monodromy_resolvent_ = lu.inverse();
  initial_ = state_at(0, 1);
}

// Periodic state at node `node` of a lattice with `per_period` cells per period:
//   X(t) = (I - e^{A tau})^{-1} int_t^{t+tau} e^{A(t+tau-s)} B(s) ds.
// The quadrature lattice refines the node lattice so every node (and every
// period boundary) is a quadrature point.
Eigen::Vector4d PeriodicOracle::state_at(long long node, long long per_period) const {
  const long long refine = (quadrature_steps_ + per_period - 1) / per_period;
  const long long cells = refine * per_period;
  const double dt = residual_.period() / static_cast<double>(cells);
  const Eigen::Matrix4d step = expm(Eigen::Matrix4d(system_ * dt));
  const long long base = node * refine;
  // Interior jumps sit on lattice points where the residual takes the mean of
  // its one-sided limits; window ends on a jump need the inner limit instead.
  const bool on_boundary = base % cells == 0;
  const auto [start_limit, end_limit] = residual_.boundary_limits();
  Eigen::Vector4d acc = Eigen::Vector4d::Zero();
  for (long long k = 0; k <= cells; ++k) {
    double value = residual_.at_lattice(base + k, cells);
    double weight = dt;
    if (k == 0 || k == cells) {
      weight = 0.5 * dt;
      if (on_boundary) value = k == 0 ? start_limit : end_limit;
    }
    acc = step * acc;
    acc(2) += weight * forcing_scale_ * value;
  }
  return monodromy_resolvent_ * acc;
}

PeriodicOracle::Trajectory PeriodicOracle::evaluate(const Grid& grid) const {
  const double ratio = grid.horizon() / residual_.period();
  const long long whole = std::llround(ratio);
  if (whole < 1 || std::abs(ratio - static_cast<double>(whole)) > 1e-9 * ratio ||
      grid.steps() % whole != 0) {
    throw GridMismatch("grid must cover whole periods with boundaries on nodes");
  }
  const long long per = grid.steps() / whole;
  std::vector<Eigen::Vector4d> period_states(static_cast<std::size_t>(per));
  for (long long i = 0; i < per; ++i) period_states[static_cast<std::size_t>(i)] = state_at(i, per);
  Trajectory out{GridFn(grid), GridFn(grid), GridFn(grid), GridFn(grid)};
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    const auto& x = period_states[i % static_cast<std::size_t>(per)];
    out.major[i] = x(0);
    out.minor[i] = x(1);
    out.major_rate[i] = x(2);
    out.minor_rate[i] = x(3);
  }
  return out;
}

PeriodicOracle periodic_oracle_matrix(const MarketParams& params, const PeriodicResidual& residual,
                                      const SolveOptions& opts) {
  return PeriodicOracle(params, residual, opts);
}

AssembledSolution assemble_decomposition(const GridFn& periodic_major, const GridFn& periodic_minor,
                                         const TrendSolution& trend, const Inventories& inv,
                                         int periods) {
  const Grid& period_grid = periodic_major.grid();
  const Grid& grid = trend.major.grid();
  if (periods < 1 || !(periodic_minor.grid() == period_grid) || !(trend.minor.grid() == grid) ||
      static_cast<long long>(period_grid.steps()) * periods != grid.steps() ||
      std::abs(period_grid.horizon() * periods - grid.horizon()) > 1e-12 * grid.horizon()) {
    throw GridMismatch("period grid does not tile the horizon grid");
  }
  const auto per = static_cast<std::size_t>(period_grid.steps());
  Decomposition parts{GridFn(grid), GridFn(grid), trend.major, trend.minor};
  GridFn q_major(grid);
  GridFn q_minor(grid);
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    const std::size_t k = i % per;
    parts.periodic_major[i] = periodic_major[k];
    parts.periodic_minor[i] = periodic_minor[k];
    const double line = inv.major * (1.0 - static_cast<double>(i) / grid.steps());
    q_major[i] = line + parts.periodic_major[i] + trend.major[i];
    q_minor[i] = parts.periodic_minor[i] + trend.minor[i];
  }
  return {std::move(parts), with_rates(std::move(q_major), std::move(q_minor))};
}

}  // namespace mmliq
