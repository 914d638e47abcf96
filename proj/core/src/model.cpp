#include "mmliq/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mmliq/errors.hpp"

namespace mmliq {

namespace {

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

// Snaps t to [0, T] when it is within rounding of the interval.
double clamp_time(double t, double horizon) {
  const double slack = 1e-12 * horizon;
  if (t < -slack || t > horizon + slack || !std::isfinite(t)) {
    throw DomainError("time " + std::to_string(t) + " outside [0, " + std::to_string(horizon) + "]");
  }
  return std::clamp(t, 0.0, horizon);
}

// Returns k when x is within 1e-9 of the integer k.
std::optional<long long> near_integer(double x) {
  const double k = std::round(x);
  if (std::abs(x - k) <= 1e-9 * std::max(1.0, std::abs(k))) return static_cast<long long>(k);
  return std::nullopt;
}

double twap_step_inventory(const TwapStep& s, double t, double horizon) {
  const double x = t * s.periods / horizon;
  const double n = s.periods;
  if (auto k = near_integer(x)) return (n - static_cast<double>(*k)) / n * s.q0;
  const double k = std::floor(x) + 1.0;  // t lies in ((k-1)T/n, kT/n)
  return (2.0 * n - 2.0 * k + 1.0) / (2.0 * n) * s.q0;
}

double sampled_inventory(const SampledRate& s, const std::vector<double>& cumulative, double t,
                         double horizon) {
  const auto cells = static_cast<long long>(s.cell_rates.size());
  const double width = horizon / static_cast<double>(cells);
  const double x = t / width;
  if (auto k = near_integer(x)) return cumulative[static_cast<std::size_t>(*k)];
  const auto c = std::clamp(static_cast<long long>(std::floor(x)), 0LL, cells - 1);
  return cumulative[static_cast<std::size_t>(c)] +
         (t - static_cast<double>(c) * width) * s.cell_rates[static_cast<std::size_t>(c)];
}

}  // namespace

void MarketParams::validate() const {
  if (!finite_all({major_temp_impact, minor_temp_impact, major_perm_impact, minor_perm_impact,
                   major_risk_aversion, minor_risk_aversion, volatility, horizon})) {
    throw DomainError("market parameters must be finite");
  }
  if (!(major_temp_impact > 0.0)) throw DomainError("major temporary impact must be > 0");
  if (!(minor_temp_impact > 0.0)) throw DomainError("minor temporary impact must be > 0");
  if (!(major_risk_aversion > 0.0)) throw DomainError("major risk aversion must be > 0");
  if (!(minor_risk_aversion > 0.0)) throw DomainError("minor risk aversion must be > 0");
  if (!(horizon > 0.0)) throw DomainError("horizon must be > 0");
  if (major_perm_impact < 0.0) throw DomainError("major permanent impact must be >= 0");
  if (minor_perm_impact < 0.0) throw DomainError("minor permanent impact must be >= 0");
  if (volatility < 0.0) throw DomainError("volatility must be >= 0");
}

MarketParams MarketParams::reference() {
  MarketParams p;
  p.major_temp_impact = 0.001;
  p.minor_temp_impact = 0.001;
  p.major_perm_impact = 0.01;
  p.minor_perm_impact = 0.005;
  p.major_risk_aversion = 0.1;
  p.minor_risk_aversion = 0.01;
  p.volatility = 0.0;
  p.horizon = 10.0;
  return p;
}

bool satisfies_interaction_bounds(const MarketParams& p, const std::array<double, 3>& theta) {
  const auto [t1, t2, t3] = theta;
  if (!(t1 > 0.0 && t2 > 0.0 && t3 > 0.0)) return false;
  const double lam0 = p.major_perm_impact;
  const double lam = p.minor_perm_impact;
  if (!(t2 > lam0 / 2.0)) return false;
  if (lam > 0.0) {
    if (!(1.0 / (1.0 / t1 + 1.0 / t3) > lam / 2.0)) return false;
    if (!(t1 < 8.0 * p.major_risk_aversion * p.minor_temp_impact / lam)) return false;
  }
  return lam0 / p.major_temp_impact * t2 + lam / p.minor_temp_impact * t3 <
         8.0 * p.minor_risk_aversion;
}

// The infimum of the left side of the last inequality is reached with theta2 at
// lam0/2, theta1 at its upper limit and theta3 at the smallest value keeping the
// harmonic mean above lam/2. Feasibility is strict comparison against that
// infimum; the witness backs off the limits until all four inequalities hold.
ValidationReport validate_params(const MarketParams& p) {
  p.validate();
  ValidationReport report;
  const double lam0 = p.major_perm_impact;
  const double lam = p.minor_perm_impact;
  const double budget = 8.0 * p.minor_risk_aversion;
  const double slope2 = lam0 / p.major_temp_impact;
  const double slope3 = lam / p.minor_temp_impact;

  double theta1_sup = 1.0;
  double theta3_inf = 0.0;
  if (lam > 0.0) {
    theta1_sup = 8.0 * p.major_risk_aversion * p.minor_temp_impact / lam;
    if (!(theta1_sup > lam / 2.0)) {
      report.violated.push_back(
          "theta1 upper limit 8*phi0*a/lambda does not exceed lambda/2; harmonic-mean bound "
          "unreachable");
      return report;
    }
    theta3_inf = (lam / 2.0) * theta1_sup / (theta1_sup - lam / 2.0);
  }
  const double infimum = slope2 * lam0 / 2.0 + slope3 * theta3_inf;
  if (!(infimum < budget)) {
    report.violated.push_back("(lambda0/a0)*theta2 + (lambda/a)*theta3 >= 8*phi for every admissible "
                              "theta (infimum " + std::to_string(infimum) + ", bound " +
                              std::to_string(budget) + ")");
    return report;
  }

  for (double slack = 0.5; slack > 1e-15; slack *= 0.5) {
    std::array<double, 3> theta{};
    theta[0] = lam > 0.0 ? theta1_sup * (1.0 - slack) : 1.0;
    double theta3 = 1.0;
    if (lam > 0.0) {
      const double need = theta[0] - lam / 2.0;
      if (!(need > 0.0)) continue;
      theta3 = (lam / 2.0) * theta[0] / need * (1.0 + slack);
    }
    theta[2] = theta3;
    theta[1] = lam0 > 0.0 ? lam0 / 2.0 * (1.0 + slack) : slack;
    if (satisfies_interaction_bounds(p, theta)) {
      report.feasible = true;
      report.witness = theta;
      return report;
    }
  }
  report.violated.push_back("no witness found within floating-point resolution of the boundary");
  return report;
}

// --- targets -----------------------------------------------------------------

TargetStrategy::TargetStrategy(double horizon, Variant variant)
    : horizon_(horizon), variant_(std::move(variant)) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("target horizon must be > 0");
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if (!std::isfinite(v.q0)) throw DomainError("target q0 must be finite");
        if constexpr (std::is_same_v<V, Cosine>) {
          if (v.periods < 1) throw DomainError("cosine target needs periods >= 1");
          if (!std::isfinite(v.amplitude)) throw DomainError("cosine amplitude must be finite");
        } else if constexpr (std::is_same_v<V, TwapStep>) {
          if (v.periods < 1) throw DomainError("TWAP target needs periods >= 1");
        } else if constexpr (std::is_same_v<V, SampledRate>) {
          if (v.cell_rates.empty()) throw DomainError("sampled rate needs at least one cell");
          if (v.periods && *v.periods < 1) throw DomainError("sampled rate periods must be >= 1");
          const double width = horizon / static_cast<double>(v.cell_rates.size());
          cumulative_.resize(v.cell_rates.size() + 1);
          cumulative_[0] = v.q0;
          for (std::size_t c = 0; c < v.cell_rates.size(); ++c) {
            if (!std::isfinite(v.cell_rates[c])) throw DomainError("sampled rate must be finite");
            cumulative_[c + 1] = cumulative_[c] + width * v.cell_rates[c];
          }
          if (std::abs(cumulative_.back()) > 1e-9 * std::abs(v.q0)) {
            throw DomainError("sampled rate leaves " + std::to_string(cumulative_.back()) +
                              " shares at the horizon");
          }
        }
      },
      variant_);
}

double TargetStrategy::initial_inventory() const {
  return std::visit([](const auto& v) { return v.q0; }, variant_);
}

std::optional<int> TargetStrategy::periods() const {
  return std::visit(
      [](const auto& v) -> std::optional<int> {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, DTwap>) {
          return 1;
        } else if constexpr (std::is_same_v<V, SampledRate>) {
          return v.periods;
        } else {
          return v.periods;
        }
      },
      variant_);
}

double target_inventory(const TargetStrategy& target, double t) {
  const double T = target.horizon();
  t = clamp_time(t, T);
  return std::visit(
      [&](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, DTwap>) {
          return v.q0 * (1.0 - t / T);
        } else if constexpr (std::is_same_v<V, Cosine>) {
          return v.q0 * (1.0 - t / T) +
                 v.amplitude * std::sin(2.0 * std::numbers::pi * v.periods * t / T);
        } else if constexpr (std::is_same_v<V, TwapStep>) {
          return twap_step_inventory(v, t, T);
        } else {
          return sampled_inventory(v, target.cumulative(), t, T);
        }
      },
      target.variant());
}

double target_rate(const TargetStrategy& target, double t) {
  const double T = target.horizon();
  t = clamp_time(t, T);
  return std::visit(
      [&](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, DTwap>) {
          return -v.q0 / T;
        } else if constexpr (std::is_same_v<V, Cosine>) {
          const double omega = 2.0 * std::numbers::pi * v.periods / T;
          return -v.q0 / T + v.amplitude * omega * std::cos(omega * t);
        } else if constexpr (std::is_same_v<V, TwapStep>) {
          throw NotDifferentiable("TWAP target inventory jumps; it has no trading rate");
          return 0.0;
        } else {
          const auto cells = static_cast<long long>(v.cell_rates.size());
          const auto c = std::clamp(static_cast<long long>(std::floor(t * cells / T)), 0LL, cells - 1);
          return v.cell_rates[static_cast<std::size_t>(c)];
        }
      },
      target.variant());
}

GridFn sample_inventory(const TargetStrategy& target, const Grid& grid) {
  if (std::abs(grid.horizon() - target.horizon()) > 1e-12 * target.horizon()) {
    throw GridMismatch("grid horizon differs from target horizon");
  }
  if (const auto* step = std::get_if<TwapStep>(&target.variant())) {
    if (grid.steps() % step->periods != 0) {
      throw DomainError("grid step must divide the TWAP period so jump times fall on nodes");
    }
  }
  GridFn r(grid);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = target_inventory(target, grid.time(i));
  return r;
}

PeriodicResidual::PeriodicResidual(TargetStrategy target, int periods)
    : target_(std::move(target)), periods_(periods) {
  if (periods < 1) throw DomainError("residual needs periods >= 1");
}

double PeriodicResidual::operator()(double t) const {
  const double tau = period();
  double s = std::fmod(t, tau);
  if (s < 0.0) s += tau;
  if (near_integer(s / tau)) s = 0.0;
  const double q0 = target_.initial_inventory();
  const double T = target_.horizon();
  return target_inventory(target_, s) - q0 * (1.0 - s / T);
}

double PeriodicResidual::at_lattice(long long index, long long per_period) const {
  long long m = index % per_period;
  if (m < 0) m += per_period;
  if (m == 0) return 0.0;
  const double s = period() * static_cast<double>(m) / static_cast<double>(per_period);
  const double q0 = target_.initial_inventory();
  return target_inventory(target_, s) - q0 * (1.0 - s / target_.horizon());
}

std::pair<double, double> PeriodicResidual::boundary_limits() const {
  if (!std::holds_alternative<TwapStep>(target_.variant())) return {0.0, 0.0};
  // The TWAP inventory is flat inside a period.
  const double flat = target_inventory(target_, 0.5 * period());
  const double q0 = target_.initial_inventory();
  return {flat - q0, flat - q0 * (1.0 - period() / target_.horizon())};
}

PeriodicResidual periodic_residual(const TargetStrategy& target) {
  const auto n = target.periods();
  if (!n) throw DomainError("target is not declared periodic; no periodic-trend decomposition");
  PeriodicResidual residual(target, *n);
  const double q0 = target.initial_inventory();
  const double T = target.horizon();
  for (int k = 0; k <= *n; ++k) {
    const double t = T * k / *n;
    const double r = target_inventory(target, t) - q0 * (1.0 - t / T);
    if (std::abs(r) > 1e-9 * std::max(1.0, std::abs(q0))) {
      throw DomainError("target residual does not vanish at period boundary t=" + std::to_string(t));
    }
  }
  return residual;
}

TargetStrategy vwap_reference_target(int cells) {
  if (cells < 1) throw DomainError("vwap target needs cells >= 1");
  constexpr double kHorizon = 10.0;
  const double width = kHorizon / cells;
  SampledRate s{10.0, std::vector<double>(static_cast<std::size_t>(cells)), std::nullopt};
  for (int c = 0; c < cells; ++c) {
    const double t = (c + 0.5) * width;
    const double trend = -15.0 / 370.0 * (t - 7.0) * (t - 7.0) - 0.5;
    const double periodic = t < 3.0 ? 0.75 * std::cos(4.0 * std::numbers::pi * t)
                                     : 0.5 * std::cos(2.0 * std::numbers::pi * t);
    s.cell_rates[static_cast<std::size_t>(c)] = trend + periodic;
  }
  return TargetStrategy(kHorizon, std::move(s));
}

}  // namespace mmliq
