#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mmliq/analysis.hpp"
#include "mmliq/errors.hpp"
#include "mmliq/fdsolver.hpp"
#include "support.hpp"

namespace mmliq {
namespace {

using testing::cosine_target;
using testing::twap_target;

constexpr double kTableTol = 5e-4;

class CosineCosts : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const Grid g = Grid::from_step(10.0, 0.001);
    nash_ = new EquilibriumSolution(
        solve_equilibrium(MarketParams::reference(), testing::reference_inventories(), cosine_target(), g));
    alone_ = new EquilibriumSolution(
        solve_no_interaction(MarketParams::reference(), testing::reference_inventories(), cosine_target(), g));
  }
  static void TearDownTestSuite() {
    delete nash_;
    delete alone_;
  }
  static EquilibriumSolution* nash_;
  static EquilibriumSolution* alone_;
};
EquilibriumSolution* CosineCosts::nash_ = nullptr;
EquilibriumSolution* CosineCosts::alone_ = nullptr;

TEST_F(CosineCosts, EquilibriumBreakdownMatchesReference) {
  const auto c = evaluate_costs(*nash_, cosine_target(), MarketParams::reference());
  EXPECT_NEAR(c.major.total, 0.0130, kTableTol);
  EXPECT_NEAR(c.major.profit_q, -0.0368, kTableTol);
  EXPECT_NEAR(c.major.profit_r, -0.0253, kTableTol);
  EXPECT_NEAR(c.major.risk, 0.0014, kTableTol);
  EXPECT_NEAR(c.minor.total, -0.0246, kTableTol);
  EXPECT_NEAR(c.minor.profit_q, 0.0475, kTableTol);
  EXPECT_NEAR(c.minor.risk, 0.0229, kTableTol);
  EXPECT_EQ(c.minor.profit_r, 0.0);
  EXPECT_NEAR(c.major.total, -c.major.profit_q + c.major.profit_r + c.major.risk, 1e-15);
  EXPECT_NEAR(c.minor.total, -c.minor.profit_q + c.minor.risk, 1e-15);
}

TEST_F(CosineCosts, NoInteractionBreakdownMatchesReference) {
  const auto c = evaluate_costs(*alone_, cosine_target(), MarketParams::reference());
  EXPECT_NEAR(c.major.total, 0.0136, kTableTol);
  EXPECT_NEAR(c.major.profit_q, -0.0126, kTableTol);
  EXPECT_EQ(c.major.profit_r, 0.0);
  EXPECT_NEAR(c.major.risk, 0.0010, kTableTol);
  EXPECT_EQ(c.minor.total, 0.0);
  EXPECT_EQ(c.minor.profit_q, 0.0);
  EXPECT_EQ(c.minor.risk, 0.0);
}

TEST_F(CosineCosts, ShortcutMatchesDirectEvaluation) {
  const MarketParams p = MarketParams::reference();
  const auto direct = evaluate_costs(*nash_, cosine_target(), p);
  const auto shortcut = optimal_cost_shortcut(*nash_, cosine_target(), p);
  EXPECT_NEAR(shortcut.major, direct.major.total, 1e-4);
  EXPECT_NEAR(shortcut.minor, direct.minor.total, 1e-4);
}

TEST_F(CosineCosts, ShortcutOnlyHoldsAtEquilibrium) {
  const MarketParams p = MarketParams::reference();
  EquilibriumSolution bent = *nash_;
  const Grid& g = bent.q_major.grid();
  for (std::size_t i = 0; i < g.nodes(); ++i) bent.q_major[i] += 0.5 * std::sin(std::numbers::pi * g.time(i) / 10.0);
  bent.v_major = forward_rate(bent.q_major);
  const auto direct = evaluate_costs(bent, cosine_target(), p);
  const auto shortcut = optimal_cost_shortcut(bent, cosine_target(), p);
  EXPECT_GT(std::abs(shortcut.major - direct.major.total), 1e-3);
  // Moving away from the best response can only cost the major more.
  EXPECT_GT(direct.major.total, evaluate_costs(*nash_, cosine_target(), p).major.total);
}

TEST_F(CosineCosts, PriceWithoutInteractionStaysAbove) {
  const MarketParams p = MarketParams::reference();
  const GridFn eq = price_path(*nash_, p);
  const GridFn ni = price_path(*alone_, p);
  EXPECT_EQ(eq.front(), 0.0);
  for (std::size_t i = 0; i < eq.size(); ++i) EXPECT_GE(ni[i] - eq[i], -1e-9);
}

TEST(Costs, ShortcutRejectsTwap) {
  const Grid g(10.0, 1000);
  const auto sol = solve_equilibrium(MarketParams::reference(), {10.0, 0.0}, twap_target(), g);
  EXPECT_THROW(optimal_cost_shortcut(sol, twap_target(), MarketParams::reference()), NotDifferentiable);
  EXPECT_NO_THROW(evaluate_costs(sol, twap_target(), MarketParams::reference()));
}

TEST(Costs, TwapPriceOrdering) {
  const Grid g(10.0, 2000);
  const MarketParams p = MarketParams::reference();
  const auto eq = price_path(solve_equilibrium(p, {10.0, 0.0}, twap_target(), g), p);
  const auto ni = price_path(solve_no_interaction(p, {10.0, 0.0}, twap_target(), g), p);
  for (std::size_t i = 0; i < eq.size(); ++i) EXPECT_GE(ni[i] - eq[i], -1e-9);
}

TEST(Price, NoTradingLeavesPriceFlat) {
  const Grid g(10.0, 100);
  const EquilibriumSolution idle{GridFn(g), GridFn(g), GridFn(g), GridFn(g)};
  EXPECT_EQ(sup_norm(price_path(idle, MarketParams::reference())), 0.0);
}

TEST(Price, TerminalPriceIsTotalPermanentImpact) {
  const Grid g(10.0, 1000);
  const MarketParams p = MarketParams::reference();
  const auto sol = solve_equilibrium(p, {10.0, 0.0}, TargetStrategy(10.0, DTwap{10.0}), g);
  EXPECT_NEAR(price_path(sol, p).back(), -0.1, 1e-12);
}

TEST(Amplitude, HalfRange) {
  const Grid g(1.0, 1000);
  GridFn flat(g, std::vector<double>(g.nodes(), 4.2));
  EXPECT_EQ(amplitude(flat), 0.0);
  GridFn wave(g);
  for (std::size_t i = 0; i < g.nodes(); ++i) wave[i] = 1.0 + 2.0 * std::sin(2.0 * std::numbers::pi * g.time(i));
  EXPECT_NEAR(amplitude(wave), 2.0, 1e-9);
}

TEST(Spectrum, RecoversPlantedModes) {
  const Grid g(10.0, 10000);
  GridFn f(g);
  for (std::size_t i = 0; i < g.nodes(); ++i) {
    const double t = g.time(i);
    f[i] = 3.0 - 0.4 * t + 0.5 * std::cos(2.0 * std::numbers::pi * t) +
           0.2 * std::sin(4.0 * std::numbers::pi * t + 0.3);
  }
  const SpectralEstimate s = spectral_amplitudes(f, 50);
  ASSERT_EQ(s.amplitudes.size(), 50u);
  EXPECT_NEAR(s.at(10), 0.5, 0.005);
  EXPECT_NEAR(s.at(20), 0.2, 0.002);
  for (int k = 1; k <= 50; ++k) {
    if (k != 10 && k != 20) EXPECT_LT(s.at(k), 0.01) << "k = " << k;
  }
}

TEST(Spectrum, KmaxRange) {
  const GridFn f(Grid(10.0, 100));
  EXPECT_THROW(spectral_amplitudes(f, 0), DomainError);
  EXPECT_THROW(spectral_amplitudes(f, 51), DomainError);
  EXPECT_NO_THROW(spectral_amplitudes(f, 50));
}

TEST(PeriodicAmplitudes, CosineReferenceValuesAndDominance) {
  const MarketParams p = MarketParams::reference();
  const auto a = periodic_amplitudes(p, periodic_residual(cosine_target()), Grid(1.0, 1000), SolveOptions{});
  EXPECT_NEAR(a.rate_equilibrium / 0.672341, 1.0, 0.005);
  EXPECT_NEAR(a.rate_nogame / 0.716953, 1.0, 0.005);
  EXPECT_NEAR(a.price_equilibrium / 0.001020, 1.0, 0.005);
  EXPECT_NEAR(a.price_nogame / 0.001141, 1.0, 0.005);
  EXPECT_LT(a.rate_equilibrium, a.rate_nogame);
  EXPECT_LT(a.price_equilibrium, a.price_nogame);
}

TEST(PeriodicAmplitudes, TwapRateValuesAndDominance) {
  const MarketParams p = MarketParams::reference();
  const auto a = periodic_amplitudes(p, periodic_residual(twap_target()), Grid(1.0, 1000), SolveOptions{});
  EXPECT_NEAR(a.rate_equilibrium / 2.364551, 1.0, 0.01);
  EXPECT_NEAR(a.rate_nogame / 2.466589, 1.0, 0.01);
  EXPECT_LT(a.rate_equilibrium, a.rate_nogame);
  EXPECT_LT(a.price_equilibrium, a.price_nogame);
}

TEST(PeriodicMarket, WrapsRatesAroundThePeriod) {
  const MarketParams p = MarketParams::reference();
  const Grid g(1.0, 200);
  const auto per = solve_periodic(p, periodic_residual(cosine_target()), g, SolveOptions{});
  const auto m = periodic_market(per, p);
  ASSERT_EQ(m.aggregate_rate.size(), 200u);
  double sum = 0.0;
  for (double v : m.aggregate_rate) sum += v;
  EXPECT_NEAR(sum, 0.0, 1e-9);
}

}  // namespace
}  // namespace mmliq
