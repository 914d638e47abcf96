#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mmliq/closedform.hpp"
#include "mmliq/errors.hpp"
#include "mmliq/fdsolver.hpp"
#include "support.hpp"

namespace mmliq {
namespace {

using testing::kCosineAmplitude;

// Independent scipy evaluation of the periodic monodromy problem, stored as
// (major residual, minor, major residual rate, minor rate).
constexpr double kCosineAt0[4] = {-0.0020741082368883, 0.062159767286767, 0.67297205176513,
                                  -0.11571733392854};
constexpr double kCosineAtQuarter[4] = {0.10710682860112, -0.018416985696142, 0.013032006399517,
                                        -0.39056133651391};

TEST(NoGameConstants, OrderingAndValues) {
  const auto c = no_game_constants(MarketParams::reference());
  EXPECT_NEAR(c.major_rate, 10.0, 1e-12);
  EXPECT_NEAR(c.minor_rate, std::sqrt(10.0), 1e-12);
  EXPECT_GE(c.minor_mf_rate, c.minor_rate);
}

TEST(CosineComponents, MatchFrozenOracleState) {
  const auto h = cosine_periodic_components(MarketParams::reference(), 10, kCosineAmplitude);
  EXPECT_GT(h.K, 0.0);
  EXPECT_NEAR(h.major(0.0), kCosineAt0[0], 1e-12);
  EXPECT_NEAR(h.minor(0.0), kCosineAt0[1], 1e-12);
  EXPECT_NEAR(h.major_rate(0.0), kCosineAt0[2], 1e-11);
  EXPECT_NEAR(h.minor_rate(0.0), kCosineAt0[3], 1e-11);
  EXPECT_NEAR(h.major(0.25), kCosineAtQuarter[0], 1e-12);
  EXPECT_NEAR(h.minor(0.25), kCosineAtQuarter[1], 1e-12);
  EXPECT_NEAR(h.major_rate(0.25), kCosineAtQuarter[2], 1e-11);
  EXPECT_NEAR(h.minor_rate(0.25), kCosineAtQuarter[3], 1e-11);
}

TEST(CosineComponents, ZeroAmplitudeGivesZero) {
  const auto h = cosine_periodic_components(MarketParams::reference(), 10, 0.0);
  EXPECT_EQ(h.major(0.3), 0.0);
  EXPECT_EQ(h.minor(0.3), 0.0);
}

// Substitutes the harmonic into both periodic ODEs; second derivatives of a
// single harmonic are -omega^2 times the function.
TEST(CosineComponents, SolveThePeriodicEquations) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const MarketParams p = testing::draw_feasible(rng);
    const auto h = cosine_periodic_components(p, 10, kCosineAmplitude);
    const double w2 = h.omega * h.omega;
    double worst = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double t = 10.0 * i / 2000.0;
      const double forcing = kCosineAmplitude * std::sin(h.omega * t);
      const double r_major = -p.major_temp_impact * w2 * h.major(t) - p.major_risk_aversion * h.major(t) +
                             p.major_risk_aversion * forcing + 0.5 * p.minor_perm_impact * h.minor_rate(t);
      const double r_minor = -p.minor_temp_impact * w2 * h.minor(t) - p.minor_risk_aversion * h.minor(t) +
                             0.5 * p.major_perm_impact * h.major_rate(t) +
                             0.5 * p.minor_perm_impact * h.minor_rate(t);
      worst = std::max({worst, std::abs(r_major), std::abs(r_minor)});
    }
    EXPECT_LT(worst, 1e-10);
  }
}

TEST(RateAmplitudes, ReferenceValues) {
  const auto r = rate_amplitude_phase(MarketParams::reference(), 10, kCosineAmplitude);
  EXPECT_NEAR(r.major.amplitude, 0.6730982213969733, 1e-12);
  EXPECT_NEAR(r.minor.amplitude, 0.40734341648179967, 1e-12);
  EXPECT_NEAR(r.major_nogame_amplitude, 0.7169568003248976, 1e-12);
  const auto price = price_periodic_amplitude(MarketParams::reference(), 10, kCosineAmplitude);
  EXPECT_NEAR(price.nogame, 0.0011410721875505648, 1e-15);
  EXPECT_LT(price.equilibrium, price.nogame);
}

TEST(RateAmplitudes, NoMinorImpactCollapsesToNoGame) {
  MarketParams p = MarketParams::reference();
  p.minor_perm_impact = 0.0;
  const auto r = rate_amplitude_phase(p, 10, kCosineAmplitude);
  EXPECT_NEAR(r.major.amplitude, r.major_nogame_amplitude, 1e-14);
  const auto price = price_periodic_amplitude(p, 10, kCosineAmplitude);
  EXPECT_NEAR(price.equilibrium, price.nogame, 1e-15);
}

TEST(RateAmplitudes, ZeroAmplitudeIsDegenerate) {
  EXPECT_THROW(rate_amplitude_phase(MarketParams::reference(), 10, 0.0), DegeneratePhase);
}

TEST(RateAmplitudes, PropertyPhaseBoxesAndDominance) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> amp(0.01, 2.0);
  std::uniform_int_distribution<int> periods(1, 40);
  for (int trial = 0; trial < 1000; ++trial) {
    const MarketParams p = testing::draw_feasible(rng);
    const int n = periods(rng);
    const double b = amp(rng);
    const auto r = rate_amplitude_phase(p, n, b);
    EXPECT_GE(r.major.phase, 0.0);
    EXPECT_LE(r.major.phase, std::numbers::pi / 2);
    EXPECT_GE(r.minor.phase, -std::numbers::pi);
    EXPECT_LE(r.minor.phase, -std::numbers::pi / 2);
    EXPECT_LE(r.major.phase - r.minor.phase, std::numbers::pi + 1e-12);
    EXPECT_LE(r.major.amplitude, r.major_nogame_amplitude * (1.0 + 1e-12));
    const auto price = price_periodic_amplitude(p, n, b);
    EXPECT_LE(price.equilibrium, price.nogame * (1.0 + 1e-12));
  }
}

TEST(NoInteraction, MinorMatchesFrozenValues) {
  const MarketParams p = MarketParams::reference();
  EXPECT_NEAR(no_interaction_minor(p, 2.0, 0.0), 2.0, 1e-14);
  EXPECT_NEAR(no_interaction_minor(p, 2.0, 0.5), 0.19553094355418546, 1e-12);
  EXPECT_NEAR(no_interaction_minor(p, 2.0, 2.0), 0.00018271407223706323, 1e-15);
  EXPECT_NEAR(no_interaction_minor(p, 2.0, 9.9), 9.998155255082952e-21, 1e-30);
  EXPECT_EQ(no_interaction_minor(p, 2.0, 10.0), 0.0);
}

TEST(NoInteraction, MajorTracksDTwapToSecondOrder) {
  const MarketParams p = MarketParams::reference();
  const TargetStrategy line(10.0, DTwap{10.0});
  std::vector<double> errs;
  for (int steps : {2000, 4000}) {
    const Grid g(10.0, steps);
    const GridFn q = no_interaction_major(p, line, g);
    EXPECT_EQ(q.front(), 10.0);
    EXPECT_NEAR(q.back(), 0.0, 1e-14);
    double worst = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) worst = std::max(worst, std::abs(q[i] - 10.0 * (1.0 - g.time(i) / 10.0)));
    errs.push_back(worst);
  }
  EXPECT_LT(errs[1], 1e-3);
  EXPECT_NEAR(errs[0] / errs[1], 4.0, 0.5);
}

TEST(NoInteraction, MajorCosinePeriodicAmplitude) {
  const MarketParams p = MarketParams::reference();
  const Grid g(10.0, 10000);
  const GridFn q = no_interaction_major(p, testing::cosine_target(), g);
  // Away from the boundary layers the residual is a pure harmonic of
  // amplitude b phi0 / d0.
  const double omega = 2.0 * std::numbers::pi;
  const double d0 = p.major_temp_impact * omega * omega + p.major_risk_aversion;
  double peak = 0.0;
  for (std::size_t i = 3000; i < 7000; ++i) peak = std::max(peak, std::abs(q[i] - 10.0 * (1.0 - g.time(i) / 10.0)));
  EXPECT_NEAR(peak, kCosineAmplitude * p.major_risk_aversion / d0, 1e-4);
}

TEST(NoInteraction, MinorAgreesWithFiniteDifferenceSolve) {
  MarketParams p = MarketParams::reference();
  p.major_perm_impact = 0.0;
  const Grid g(10.0, 10000);
  const auto sol = solve_equilibrium(p, {10.0, 2.0}, testing::cosine_target(), g);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.nodes(); ++i) {
    worst = std::max(worst, std::abs(sol.q_minor[i] - no_interaction_minor(p, 2.0, g.time(i))));
  }
  EXPECT_LT(worst, 5.0 * g.step() * 2.0);
}

}  // namespace
}  // namespace mmliq
