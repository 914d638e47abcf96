#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mmliq/grid.hpp"

namespace mmliq {

// Market, impact and penalty constants of the major-minor liquidation game.
// Units: temporary impacts are price*time/share, permanent impacts price/share,
// risk aversions price/(share*time).
struct MarketParams {
  double major_temp_impact = 0.0;
  double minor_temp_impact = 0.0;
  double major_perm_impact = 0.0;
  double minor_perm_impact = 0.0;
  double major_risk_aversion = 0.0;
  double minor_risk_aversion = 0.0;
  double volatility = 0.0;  // carried for completeness; deterministic solvers ignore it
  double horizon = 0.0;

  // Throws DomainError on a violated sign or finiteness constraint.
  void validate() const;

  // The numerical set-up shared by every experiment preset.
  static MarketParams reference();
};

struct Inventories {
  double major = 0.0;
  double minor = 0.0;  // common deterministic inventory of every minor trader
};

// Witness search over the weak-interaction condition. Infeasible parameters are
// a normal outcome, reported through `violated`.
struct ValidationReport {
  bool feasible = false;
  std::optional<std::array<double, 3>> witness;
  std::vector<std::string> violated;
};

ValidationReport validate_params(const MarketParams& params);

// True when all four weak-interaction inequalities hold at the given point.
bool satisfies_interaction_bounds(const MarketParams& params, const std::array<double, 3>& theta);

// --- target strategies -------------------------------------------------------

struct DTwap {
  double q0;
};

// q0 (1 - t/T) + amplitude * sin(2 pi periods t / T)
struct Cosine {
  double q0;
  int periods;
  double amplitude;
};

// Trades q0/periods at each period boundary; constant in between.
struct TwapStep {
  double q0;
  int periods;
};

// Piecewise-constant trading rate on `cell_rates.size()` equal cells of [0, T].
// The inventory is q0 plus the exact running integral of the rate.
struct SampledRate {
  double q0;
  std::vector<double> cell_rates;
  std::optional<int> periods;  // set only when the rate is known to be periodic
};

class TargetStrategy {
 public:
  using Variant = std::variant<DTwap, Cosine, TwapStep, SampledRate>;

  // Validates the variant against the horizon; SampledRate must liquidate to
  // zero within 1e-9 |q0|.
  TargetStrategy(double horizon, Variant variant);

  double horizon() const { return horizon_; }
  const Variant& variant() const { return variant_; }
  double initial_inventory() const;
  std::optional<int> periods() const;
  bool differentiable() const { return !std::holds_alternative<TwapStep>(variant_); }

  // Running inventory of a SampledRate at cell boundaries; empty otherwise.
  const std::vector<double>& cumulative() const { return cumulative_; }

 private:
  double horizon_;
  Variant variant_;
  std::vector<double> cumulative_;
};

double target_inventory(const TargetStrategy& target, double t);

// Throws NotDifferentiable for TwapStep.
double target_rate(const TargetStrategy& target, double t);

// Nodes of the target inventory; TwapStep jump times must fall on nodes.
GridFn sample_inventory(const TargetStrategy& target, const Grid& grid);

// R_t - q0 (1 - t/T) for a target that is periodic with `periods()` periods.
// Evaluation wraps time modulo one period.
class PeriodicResidual {
 public:
  PeriodicResidual(TargetStrategy target, int periods);

  int periods() const { return periods_; }
  double period() const { return target_.horizon() / periods_; }
  const TargetStrategy& target() const { return target_; }

  double operator()(double t) const;
  // Evaluation at node `index` of a lattice with `per_period` cells per period;
  // period boundaries are hit exactly.
  double at_lattice(long long index, long long per_period) const;

  // One-sided limits at the period boundary: from the right at the start of a
  // period and from the left at its end. Both are 0 unless the target jumps.
  std::pair<double, double> boundary_limits() const;

 private:
  TargetStrategy target_;
  int periods_;
};

// Throws DomainError when the target has no declared period or does not vanish
// at the period boundaries.
PeriodicResidual periodic_residual(const TargetStrategy& target);

// VWAP-style rate on [0, 10] with a U-shaped trend, a half-unit periodic
// regime before t = 3 and a unit periodic regime after. It liquidates exactly
// 10 shares. Sampled at cell midpoints so the regime switch sits on a cell
// boundary.
TargetStrategy vwap_reference_target(int cells = 100000);

}  // namespace mmliq
