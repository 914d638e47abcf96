#include "mmliq/nplayer.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "mmliq/errors.hpp"

namespace mmliq {

namespace {

void require_players(std::optional<int> n) {
  if (n && *n < 1) throw DomainError("player count must be >= 1");
}

// Linear coefficient c_j of the product term -h sum_j Q_j c_j and the
// quadratic setup shared by cost evaluation and the KKT build.
struct Program {
  double temp_impact;
  double risk_aversion;
  double q0;
  double own_weight;              // lambda / N for a finite minor game, else 0
  std::vector<double> product;    // c_j, j < cells
  std::vector<double> reference;  // inventory the risk term tracks (R or 0)
};

Program build_program(const EquilibriumSolution& sol, const TargetStrategy& target,
                      const MarketParams& p, const Inventories& inv, Player player,
                      std::optional<int> n_players) {
  const Grid& grid = sol.q_major.grid();
  const auto cells = static_cast<std::size_t>(grid.steps());
  Program prog;
  prog.product.resize(cells);
  if (player == Player::major) {
    prog.temp_impact = p.major_temp_impact;
    prog.risk_aversion = p.major_risk_aversion;
    prog.q0 = inv.major;
    prog.own_weight = 0.0;
    for (std::size_t j = 0; j < cells; ++j) prog.product[j] = p.minor_perm_impact * sol.v_minor[j];
    const GridFn r = sample_inventory(target, grid);
    prog.reference.assign(r.values().begin(), r.values().end());
  } else {
    prog.temp_impact = p.minor_temp_impact;
    prog.risk_aversion = p.minor_risk_aversion;
    prog.q0 = inv.minor;
    const double others = n_players ? static_cast<double>(*n_players - 1) / *n_players : 1.0;
    prog.own_weight = n_players ? p.minor_perm_impact / *n_players : 0.0;
    for (std::size_t j = 0; j < cells; ++j) {
      prog.product[j] =
          p.major_perm_impact * sol.v_major[j] + p.minor_perm_impact * others * sol.v_minor[j];
    }
    prog.reference.assign(grid.nodes(), 0.0);
  }
  return prog;
}

}  // namespace

MeanFieldConstants mf_constants(const EquilibriumSolution& sol) {
  auto energy = [](const GridFn& v) {
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
    return trapezoid(sq, v.grid().step());
  };
  const double major = energy(sol.v_major);
  const double minor = energy(sol.v_minor);
  return {std::max(major, minor), minor};
}

TheoreticalBounds theoretical_bounds(double kappa, double k_val, int n_players,
                                     const MarketParams& p) {
  require_players(n_players);
  const double n = n_players;
  const double t = p.horizon;
  return {p.minor_perm_impact * 2.0 * t * kappa / std::sqrt(n),
          2.0 * t / n * std::sqrt(k_val * ((n + 1.0) * kappa + 2.0 * k_val))};
}

std::vector<double> cell_rates(const EquilibriumSolution& sol, Player player) {
  const GridFn& v = player == Player::major ? sol.v_major : sol.v_minor;
  return {v.values().begin(), v.values().end() - 1};
}

double discrete_cost(const EquilibriumSolution& sol, const TargetStrategy& target,
                     const MarketParams& p, const Inventories& inv, Player player,
                     std::optional<int> n_players, const std::vector<double>& rates) {
  require_players(n_players);
  const Program prog = build_program(sol, target, p, inv, player, n_players);
  const Grid& grid = sol.q_major.grid();
  const double h = grid.step();
  const std::size_t cells = prog.product.size();
  if (rates.size() != cells) throw GridMismatch("rate vector must have one entry per cell");

  double cost = 0.0;
  double q = prog.q0;
  std::vector<double> gap_sq(grid.nodes());
  for (std::size_t j = 0; j < cells; ++j) {
    gap_sq[j] = (q - prog.reference[j]) * (q - prog.reference[j]);
    cost += h * (prog.temp_impact * rates[j] * rates[j] -
                 q * (prog.product[j] + prog.own_weight * rates[j]));
    if (player == Player::major) cost += h * prog.reference[j] * prog.product[j];
    q += h * rates[j];
  }
  gap_sq[cells] = (q - prog.reference[cells]) * (q - prog.reference[cells]);
  return cost + prog.risk_aversion * trapezoid(gap_sq, h);
}

std::vector<double> best_response_rates(const EquilibriumSolution& sol, const TargetStrategy& target,
                                        const MarketParams& p, const Inventories& inv,
                                        Player player, std::optional<int> n_players) {
  require_players(n_players);
  const Program prog = build_program(sol, target, p, inv, player, n_players);
  const double h = sol.q_major.grid().step();
  const auto cells = static_cast<Eigen::Index>(prog.product.size());
  const auto nodes = cells + 1;

  // Inventory at node j is q0 + h * sum_{k<j} v_k. Suffix sums over nodes
  // after cell k give the coefficients of v_k.
  std::vector<double> weight_tail(static_cast<std::size_t>(nodes) + 1, 0.0);
  std::vector<double> gap_tail(static_cast<std::size_t>(nodes) + 1, 0.0);
  std::vector<double> product_tail(static_cast<std::size_t>(nodes) + 1, 0.0);
  for (Eigen::Index j = nodes - 1; j >= 0; --j) {
    const auto u = static_cast<std::size_t>(j);
    const double w = (j == 0 || j == nodes - 1) ? 0.5 * h : h;
    weight_tail[u] = weight_tail[u + 1] + w;
    gap_tail[u] = gap_tail[u + 1] + w * (prog.q0 - prog.reference[u]);
    product_tail[u] = product_tail[u + 1] + (j < cells ? prog.product[u] : 0.0);
  }

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nodes, nodes);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nodes);
  const double risk = 2.0 * prog.risk_aversion * h * h;
  const double own = -prog.own_weight * h * h;
  for (Eigen::Index k = 0; k < cells; ++k) {
    for (Eigen::Index l = 0; l < cells; ++l) {
      const auto later = static_cast<std::size_t>(std::max(k, l) + 1);
      kkt(k, l) = risk * weight_tail[later] + (k == l ? 2.0 * prog.temp_impact * h : own);
    }
    const auto after = static_cast<std::size_t>(k + 1);
    const double linear = 2.0 * prog.risk_aversion * h * gap_tail[after] -
                          h * h * product_tail[after] - prog.own_weight * h * prog.q0;
    rhs(k) = -linear;
    kkt(k, cells) = h;
    kkt(cells, k) = h;
  }
  rhs(cells) = -prog.q0;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    throw SingularKKT("KKT matrix is numerically singular (rcond " + std::to_string(rcond) + ")");
  }
  const Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite()) throw SingularKKT("KKT solve produced non-finite values");
  return {x.data(), x.data() + cells};
}

GapReport best_response_gap(const EquilibriumSolution& sol, const TargetStrategy& target,
                            const MarketParams& p, const Inventories& inv, int n_players) {
  require_players(n_players);
  const auto constants = mf_constants(sol);
  const auto bounds = theoretical_bounds(constants.kappa, constants.k_val, n_players, p);
  GapReport rep;
  rep.n_players = n_players;
  rep.kappa = constants.kappa;
  rep.k_val = constants.k_val;
  rep.bound_major = bounds.major;
  rep.bound_minor = bounds.minor;

  for (Player who : {Player::major, Player::minor}) {
    const double at_mf =
        discrete_cost(sol, target, p, inv, who, n_players, cell_rates(sol, who));
    const double at_best = discrete_cost(sol, target, p, inv, who, n_players,
                                         best_response_rates(sol, target, p, inv, who, n_players));
    if (who == Player::major) {
      rep.cost_major = at_mf;
      rep.eps_major = at_mf - at_best;
    } else {
      rep.cost_minor = at_mf;
      rep.eps_minor = at_mf - at_best;
    }
  }
  return rep;
}

}  // namespace mmliq
