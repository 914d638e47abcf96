#include "mmliq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "mmliq/errors.hpp"

namespace mmliq {

namespace {

void require_same_grid(const EquilibriumSolution& sol) {
  const Grid& g = sol.q_major.grid();
  if (!(sol.q_minor.grid() == g) || !(sol.v_major.grid() == g) || !(sol.v_minor.grid() == g)) {
    throw GridMismatch("solution components live on different grids");
  }
}

template <typename F>
double integrate(const Grid& grid, F&& f) {
  std::vector<double> values(grid.nodes());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f(i);
  return trapezoid(values, grid.step());
}

}  // namespace

TraderCosts evaluate_costs(const EquilibriumSolution& sol, const TargetStrategy& target,
                           const MarketParams& p) {
  require_same_grid(sol);
  const Grid& grid = sol.q_major.grid();
  const GridFn r = sample_inventory(target, grid);
  const auto& qj = sol.q_major;
  const auto& qn = sol.q_minor;
  const auto& vj = sol.v_major;
  const auto& vn = sol.v_minor;
  const double l0 = p.major_perm_impact;
  const double l = p.minor_perm_impact;

  TraderCosts out;
  out.major.profit_q = integrate(grid, [&](std::size_t i) {
    return l * qj[i] * vn[i] - p.major_temp_impact * vj[i] * vj[i];
  });
  out.major.profit_r = integrate(grid, [&](std::size_t i) { return l * r[i] * vn[i]; });
  out.major.risk = integrate(grid, [&](std::size_t i) {
    const double gap = qj[i] - r[i];
    return p.major_risk_aversion * gap * gap;
  });
  out.major.total = -out.major.profit_q + out.major.profit_r + out.major.risk;

  out.minor.profit_q = integrate(grid, [&](std::size_t i) {
    return qn[i] * (l0 * vj[i] + l * vn[i]) - p.minor_temp_impact * vn[i] * vn[i];
  });
  out.minor.risk =
      integrate(grid, [&](std::size_t i) { return p.minor_risk_aversion * qn[i] * qn[i]; });
  out.minor.total = -out.minor.profit_q + out.minor.risk;
  return out;
}

ShortcutCosts optimal_cost_shortcut(const EquilibriumSolution& sol, const TargetStrategy& target,
                                    const MarketParams& p) {
  if (!target.differentiable()) throw NotDifferentiable("shortcut needs a differentiable target");
  require_same_grid(sol);
  const Grid& grid = sol.q_major.grid();
  const GridFn r = sample_inventory(target, grid);
  std::vector<double> r_rate(grid.nodes());
  for (std::size_t i = 0; i < grid.nodes(); ++i) r_rate[i] = target_rate(target, grid.time(i));
  const auto& qj = sol.q_major;
  const auto& qn = sol.q_minor;
  const auto& vj = sol.v_major;
  const auto& vn = sol.v_minor;
  const double l0 = p.major_perm_impact;
  const double l = p.minor_perm_impact;

  ShortcutCosts out;
  out.major = integrate(grid, [&](std::size_t i) {
    return p.major_temp_impact * vj[i] * r_rate[i] - 0.5 * l * (qj[i] - r[i]) * vn[i];
  });
  out.minor = p.minor_temp_impact * qn.front() * vn.front() -
              0.5 * integrate(grid, [&](std::size_t i) { return qn[i] * (l0 * vj[i] + l * vn[i]); });
  return out;
}

GridFn price_path(const EquilibriumSolution& sol, const MarketParams& p) {
  GridFn s(sol.q_major.grid());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = p.major_perm_impact * (sol.q_major[i] - sol.q_major.front()) +
           p.minor_perm_impact * (sol.q_minor[i] - sol.q_minor.front());
  }
  return s;
}

double amplitude(std::span<const double> series) {
  if (series.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  return 0.5 * (*hi - *lo);
}

double amplitude(const GridFn& series) { return amplitude(series.values()); }

SpectralEstimate spectral_amplitudes(const GridFn& series, int kmax) {
  const Grid& grid = series.grid();
  if (kmax < 1 || kmax > grid.steps() / 2) throw DomainError("kmax must lie in [1, steps/2]");
  const std::size_t n = grid.nodes();

  // Least-squares line in the node index.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i);
    sx += x;
    sy += series[i];
    sxx += x * x;
    sxy += x * series[i];
  }
  const double m = static_cast<double>(n);
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / m;
  std::vector<double> detrended(n);
  for (std::size_t i = 0; i < n; ++i) {
    detrended[i] = series[i] - intercept - slope * static_cast<double>(i);
  }

  SpectralEstimate out;
  out.amplitudes.reserve(static_cast<std::size_t>(kmax));
  const double h = grid.step();
  for (int k = 1; k <= kmax; ++k) {
    const double dtheta = -2.0 * std::numbers::pi * k / grid.steps();
    std::complex<double> sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
      sum += w * detrended[i] * std::polar(1.0, dtheta * static_cast<double>(i));
    }
    out.amplitudes.push_back(2.0 / grid.horizon() * std::abs(sum * h));
  }
  return out;
}

PeriodicMarket periodic_market(const PeriodicSolution& periodic, const MarketParams& p) {
  const auto per = static_cast<std::size_t>(periodic.major.grid().steps());
  const double h = periodic.major.grid().step();
  PeriodicMarket out;
  out.aggregate_rate.resize(per);
  out.price.resize(per);
  for (std::size_t j = 0; j < per; ++j) {
    const std::size_t next = (j + 1) % per;
    out.aggregate_rate[j] = (periodic.major[next] - periodic.major[j]) / h +
                            (periodic.minor[next] - periodic.minor[j]) / h;
    out.price[j] = p.major_perm_impact * periodic.major[j] + p.minor_perm_impact * periodic.minor[j];
  }
  return out;
}

PeriodicAmplitudes periodic_amplitudes(const MarketParams& params, const PeriodicResidual& residual,
                                       const Grid& period_grid, const SolveOptions& opts) {
  MarketParams deaf = params;
  deaf.minor_perm_impact = 0.0;
  const auto with_feedback = solve_periodic(params, residual, period_grid, opts);
  const auto eq = periodic_market(with_feedback, params);
  const auto solo = solve_periodic(deaf, residual, period_grid, opts);
  // Without the feedback the minors hold nothing periodic, so only the
  // major's component enters the aggregate quantities.
  PeriodicSolution major_only = solo;
  for (std::size_t i = 0; i < major_only.minor.size(); ++i) major_only.minor[i] = 0.0;
  const auto ng = periodic_market(major_only, params);
  std::vector<double> held(with_feedback.major.size());
  for (std::size_t i = 0; i < held.size(); ++i) {
    held[i] = with_feedback.major[i] + with_feedback.minor[i];
  }
  return {amplitude(eq.aggregate_rate), amplitude(ng.aggregate_rate), amplitude(eq.price),
          amplitude(ng.price), amplitude(held), amplitude(solo.major.values())};
}

}  // namespace mmliq
