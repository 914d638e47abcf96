#pragma once

#include <Eigen/Core>

#include "mmliq/grid.hpp"
#include "mmliq/model.hpp"

namespace mmliq {

struct SolveOptions {
  int max_iter = 200;                     // outer relaxation sweeps of the periodic solve
  double tol = 1e-10;                     // stop once both initial-value updates are below this
  int oracle_quadrature_steps = 20000;    // trapezoid cells per period for the oracle
  double start_major = 0.0;               // initial guess of the periodic initial values
  double start_minor = 0.0;

  void validate() const;
};

struct EquilibriumSolution {
  GridFn q_major;
  GridFn q_minor;
  GridFn v_major;
  GridFn v_minor;
};

struct PeriodicSolution {
  GridFn major;  // one period, both ends equal
  GridFn minor;
  double major_initial = 0.0;
  double minor_initial = 0.0;
  int iterations = 0;
};

struct TrendSolution {
  GridFn major;
  GridFn minor;
};

struct Decomposition {
  GridFn periodic_major;  // tiled over the full horizon
  GridFn periodic_minor;
  GridFn trend_major;
  GridFn trend_minor;
};

struct AssembledSolution {
  Decomposition parts;
  EquilibriumSolution solution;
};

// Largest absolute residuals of the two discrete equation families at the
// interior nodes.
struct StencilResidual {
  double major = 0.0;
  double minor = 0.0;
};

// Central second difference, forward first difference, boundaries pinned.
EquilibriumSolution solve_equilibrium(const MarketParams& params, const Inventories& inv,
                                      const TargetStrategy& target, const Grid& grid);

// Pair without cross-interaction: the major ignores the minors' impact and the
// minors ignore the major's. Same stencils as solve_equilibrium.
EquilibriumSolution solve_no_interaction(const MarketParams& params, const Inventories& inv,
                                         const TargetStrategy& target, const Grid& grid);

StencilResidual equilibrium_residual(const MarketParams& params, const GridFn& target_samples,
                                     const EquilibriumSolution& sol);

// Relaxation for the periodic response to `residual`. Each sweep solves the
// stencil system on a window of several periods with both ends pinned to the
// current initial values and averages those values with the solution one
// period in. `period_grid` spans one period. Throws NonConvergence.
PeriodicSolution solve_periodic(const MarketParams& params, const PeriodicResidual& residual,
                                const Grid& period_grid, const SolveOptions& opts);

// Smooth remainder after removing the D-TWAP line and the periodic part.
TrendSolution solve_trend(const MarketParams& params, const Inventories& inv,
                          double periodic_major_initial, double periodic_minor_initial,
                          const Grid& grid);

// Exact periodic solution of the linear ODE in first-order form
//   X = (major residual, minor inventory, major residual rate, minor rate).
class PeriodicOracle {
 public:
  struct Trajectory {
    GridFn major;
    GridFn minor;
    GridFn major_rate;
    GridFn minor_rate;
  };

  PeriodicOracle(const MarketParams& params, PeriodicResidual residual, const SolveOptions& opts);

  const Eigen::Vector4d& initial_state() const { return initial_; }
  const Eigen::Matrix4d& system() const { return system_; }

  // Periodic state at every node. Period boundaries must fall on nodes.
  Trajectory evaluate(const Grid& grid) const;

 private:
  Eigen::Vector4d state_at(long long node, long long per_period) const;

  PeriodicResidual residual_;
  double forcing_scale_;
  int quadrature_steps_;
  Eigen::Matrix4d system_;
  Eigen::Matrix4d monodromy_resolvent_;  // (I - e^{A tau})^{-1}
  Eigen::Vector4d initial_;
};

// Throws SingularMatrix when I - e^{A tau} is numerically singular.
PeriodicOracle periodic_oracle_matrix(const MarketParams& params, const PeriodicResidual& residual,
                                      const SolveOptions& opts);

// Tiles one period across the horizon and adds the D-TWAP line and the trend.
// Throws GridMismatch unless periods * period cells equal the trend grid cells.
AssembledSolution assemble_decomposition(const GridFn& periodic_major, const GridFn& periodic_minor,
                                         const TrendSolution& trend, const Inventories& inv,
                                         int periods);

}  // namespace mmliq
