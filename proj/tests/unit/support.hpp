#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "mmliq/model.hpp"

namespace mmliq::testing {

inline constexpr double kCosineAmplitude = 0.5 / std::numbers::pi;

inline TargetStrategy cosine_target() {
  return TargetStrategy(10.0, Cosine{10.0, 10, kCosineAmplitude});
}

inline TargetStrategy twap_target() { return TargetStrategy(10.0, TwapStep{10.0, 10}); }

inline Inventories reference_inventories() { return {10.0, 0.0}; }

// Random parameters that pass the weak-interaction check. Draws are rejected
// until feasible, so callers see only valid games.
inline MarketParams draw_feasible(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(rng)); };
  for (;;) {
    MarketParams p;
    p.major_temp_impact = log_uniform(1e-4, 1e-2);
    p.minor_temp_impact = log_uniform(1e-4, 1e-2);
    p.major_perm_impact = log_uniform(1e-4, 5e-2);
    p.minor_perm_impact = log_uniform(1e-4, 2e-2);
    p.major_risk_aversion = log_uniform(1e-2, 1.0);
    p.minor_risk_aversion = log_uniform(1e-3, 1e-1);
    p.horizon = 10.0;
    if (validate_params(p).feasible) return p;
  }
}

}  // namespace mmliq::testing
