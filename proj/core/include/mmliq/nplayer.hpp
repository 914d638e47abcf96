#pragma once

#include <optional>
#include <vector>

#include "mmliq/fdsolver.hpp"
#include "mmliq/model.hpp"

namespace mmliq {

struct MeanFieldConstants {
  double kappa = 0.0;  // max of the two rate energies (shares^2/time)
  double k_val = 0.0;  // minor rate energy
};

struct TheoreticalBounds {
  double major = 0.0;
  double minor = 0.0;
};

struct GapReport {
  int n_players = 0;
  double kappa = 0.0;
  double k_val = 0.0;
  double bound_major = 0.0;
  double bound_minor = 0.0;
  double eps_major = 0.0;
  double eps_minor = 0.0;
  double cost_major = 0.0;  // N-player cost at the mean-field strategies
  double cost_minor = 0.0;
};

enum class Player { major, minor };

MeanFieldConstants mf_constants(const EquilibriumSolution& sol);

// Throws DomainError for n_players < 1.
TheoreticalBounds theoretical_bounds(double kappa, double k_val, int n_players,
                                     const MarketParams& params);

// Discretized N-player cost of `player` using cell rates `rates` while every
// opponent keeps its mean-field strategy from `sol`. With no player count the
// own contribution to the minor average is dropped (mean-field objective).
// Rate products use left nodes, squared inventories the trapezoid rule; the
// stationarity conditions of these sums are the stencil equations.
double discrete_cost(const EquilibriumSolution& sol, const TargetStrategy& target,
                     const MarketParams& params, const Inventories& inv, Player player,
                     std::optional<int> n_players, const std::vector<double>& rates);

// Exact minimizer of discrete_cost subject to full liquidation, from the KKT
// system of the equality-constrained quadratic program. Throws SingularKKT.
std::vector<double> best_response_rates(const EquilibriumSolution& sol, const TargetStrategy& target,
                                        const MarketParams& params, const Inventories& inv,
                                        Player player, std::optional<int> n_players);

// Mean-field cell rates of `player` taken from `sol`.
std::vector<double> cell_rates(const EquilibriumSolution& sol, Player player);

GapReport best_response_gap(const EquilibriumSolution& sol, const TargetStrategy& target,
                            const MarketParams& params, const Inventories& inv, int n_players);

}  // namespace mmliq
