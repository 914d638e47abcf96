#pragma once

#include <vector>

#include "mmliq/fdsolver.hpp"
#include "mmliq/grid.hpp"
#include "mmliq/model.hpp"

namespace mmliq {

// Raw integrals; the reported tables use the same signs.
//   major: total = -profit_q + profit_r + risk
//   minor: total = -profit_q + risk   (profit_r is always 0)
struct CostBreakdown {
  double profit_q = 0.0;
  double profit_r = 0.0;
  double risk = 0.0;
  double total = 0.0;
};

struct TraderCosts {
  CostBreakdown major;
  CostBreakdown minor;
};

struct ShortcutCosts {
  double major = 0.0;
  double minor = 0.0;
};

struct SpectralEstimate {
  std::vector<double> amplitudes;  // entry k-1 holds |A_k|

  double at(int k) const { return amplitudes.at(static_cast<std::size_t>(k - 1)); }
};

// Trapezoid quadrature of the two cost functionals along `sol`.
TraderCosts evaluate_costs(const EquilibriumSolution& sol, const TargetStrategy& target,
                           const MarketParams& params);

// Closed-form equilibrium costs in terms of the rates. Only meaningful when
// `sol` is an equilibrium. Throws NotDifferentiable for TwapStep targets.
ShortcutCosts optimal_cost_shortcut(const EquilibriumSolution& sol, const TargetStrategy& target,
                                    const MarketParams& params);

// Permanent-impact price drift relative to S_0 = 0.
GridFn price_path(const EquilibriumSolution& sol, const MarketParams& params);

// Half the peak-to-peak range over the nodes.
double amplitude(const GridFn& series);
double amplitude(std::span<const double> series);

// Fourier magnitudes |A_k|, k = 1..kmax, of the series after removing its
// least-squares straight line. Throws DomainError unless 1 <= kmax <= steps/2.
SpectralEstimate spectral_amplitudes(const GridFn& series, int kmax);

// Periodic components over one period: rates by forward differences that wrap
// around the period boundary.
struct PeriodicMarket {
  std::vector<double> aggregate_rate;
  std::vector<double> price;
};

PeriodicMarket periodic_market(const PeriodicSolution& periodic, const MarketParams& params);

struct PeriodicAmplitudes {
  double rate_equilibrium = 0.0;
  double rate_nogame = 0.0;
  double price_equilibrium = 0.0;
  double price_nogame = 0.0;
  // Unweighted sum of the two periodic inventories.
  double inventory_equilibrium = 0.0;
  double inventory_nogame = 0.0;
};

// Amplitudes of the periodic aggregate rate and price, with and without the
// minors' impact on the major. Both periodic solves share `period_grid`.
PeriodicAmplitudes periodic_amplitudes(const MarketParams& params, const PeriodicResidual& residual,
                                       const Grid& period_grid, const SolveOptions& opts);

}  // namespace mmliq
