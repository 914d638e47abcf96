#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mmliq/errors.hpp"
#include "mmliq/grid.hpp"
#include "mmliq/model.hpp"
#include "support.hpp"

namespace mmliq {
namespace {

TEST(Grid, FromStepRequiresIntegerCellCount) {
  EXPECT_EQ(Grid::from_step(10.0, 0.001).steps(), 10000);
  EXPECT_EQ(Grid::from_step(10.0, 0.01).nodes(), 1001u);
  EXPECT_THROW(Grid::from_step(10.0, 0.003), DomainError);
  EXPECT_THROW(Grid(10.0, 0), DomainError);
  EXPECT_THROW(Grid(-1.0, 10), DomainError);
}

TEST(Grid, NodeTimesHitEndpointsExactly) {
  const Grid g(10.0, 7);
  EXPECT_EQ(g.time(0), 0.0);
  EXPECT_EQ(g.time(7), 10.0);
}

TEST(GridFn, SizeMismatchIsRejected) {
  EXPECT_THROW(GridFn(Grid(1.0, 4), std::vector<double>(4, 0.0)), GridMismatch);
}

TEST(GridFn, TrapezoidIsExactForAffineData) {
  const Grid g(2.0, 8);
  GridFn f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 3.0 * g.time(i) - 1.0;
  EXPECT_NEAR(trapezoid(f), 4.0, 1e-14);
}

TEST(GridFn, ForwardRateReusesLastDifference) {
  const Grid g(1.0, 4);
  GridFn q(g, {0.0, 1.0, 3.0, 6.0, 10.0});
  const GridFn v = forward_rate(q);
  EXPECT_DOUBLE_EQ(v[0], 4.0);
  EXPECT_DOUBLE_EQ(v[3], 16.0);
  EXPECT_DOUBLE_EQ(v[4], 16.0);
}

TEST(MarketParams, ValidationRejectsBadSigns) {
  MarketParams p = MarketParams::reference();
  EXPECT_NO_THROW(p.validate());
  p.major_temp_impact = -0.001;
  EXPECT_THROW(p.validate(), DomainError);
  p = MarketParams::reference();
  p.minor_perm_impact = -1.0;
  EXPECT_THROW(p.validate(), DomainError);
  p = MarketParams::reference();
  p.horizon = std::nan("");
  EXPECT_THROW(p.validate(), DomainError);
}

TEST(WeakInteraction, ReferenceParametersAreFeasibleWithVerifiedWitness) {
  const MarketParams p = MarketParams::reference();
  const ValidationReport r = validate_params(p);
  ASSERT_TRUE(r.feasible);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_TRUE(satisfies_interaction_bounds(p, *r.witness));
  EXPECT_TRUE(r.violated.empty());
}

TEST(WeakInteraction, SmallMinorRiskAversionIsInfeasible) {
  MarketParams p = MarketParams::reference();
  p.minor_risk_aversion = 0.001;
  const ValidationReport r = validate_params(p);
  EXPECT_FALSE(r.feasible);
  EXPECT_FALSE(r.witness.has_value());
  EXPECT_FALSE(r.violated.empty());
}

TEST(WeakInteraction, LargeMinorImpactIsInfeasible) {
  MarketParams p = MarketParams::reference();
  p.minor_perm_impact = 0.2;
  EXPECT_FALSE(validate_params(p).feasible);
}

// Whenever a witness is reported it satisfies all four inequalities; when the
// check says infeasible, random probing of the admissible box finds nothing.
TEST(WeakInteraction, PropertyWitnessesAreSoundAndInfeasibilityHolds) {
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int feasible = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    MarketParams p;
    p.major_temp_impact = 1e-4 + 1e-2 * u(rng);
    p.minor_temp_impact = 1e-4 + 1e-2 * u(rng);
    p.major_perm_impact = 0.05 * u(rng);
    p.minor_perm_impact = 0.05 * u(rng);
    p.major_risk_aversion = 1e-3 + u(rng);
    p.minor_risk_aversion = 1e-3 + 0.05 * u(rng);
    p.horizon = 10.0;
    const ValidationReport r = validate_params(p);
    if (r.feasible) {
      ++feasible;
      ASSERT_TRUE(r.witness);
      EXPECT_TRUE(satisfies_interaction_bounds(p, *r.witness));
    } else {
      ++infeasible;
      for (int probe = 0; probe < 200; ++probe) {
        const std::array<double, 3> theta{std::pow(10.0, -4.0 + 6.0 * u(rng)),
                                          std::pow(10.0, -4.0 + 6.0 * u(rng)),
                                          std::pow(10.0, -4.0 + 6.0 * u(rng))};
        EXPECT_FALSE(satisfies_interaction_bounds(p, theta));
      }
    }
  }
  EXPECT_GT(feasible, 20);
  EXPECT_GT(infeasible, 20);
}

TEST(Targets, DTwapIsLinear) {
  const TargetStrategy t(10.0, DTwap{10.0});
  EXPECT_DOUBLE_EQ(target_inventory(t, 0.0), 10.0);
  EXPECT_DOUBLE_EQ(target_inventory(t, 2.5), 7.5);
  EXPECT_DOUBLE_EQ(target_rate(t, 4.0), -1.0);
  EXPECT_EQ(t.periods(), 1);
}

TEST(Targets, CosineMatchesItsDefinitionAndDerivative) {
  const TargetStrategy t = testing::cosine_target();
  const double b = testing::kCosineAmplitude;
  for (double s : {0.0, 0.13, 2.5, 7.77, 10.0}) {
    EXPECT_NEAR(target_inventory(t, s), 10.0 * (1.0 - s / 10.0) + b * std::sin(2.0 * std::numbers::pi * s),
                1e-13);
    const double d = 1e-6;
    if (s > d && s < 10.0 - d) {
      const double fd = (target_inventory(t, s + d) - target_inventory(t, s - d)) / (2.0 * d);
      EXPECT_NEAR(target_rate(t, s), fd, 1e-7);
    }
  }
}

TEST(Targets, TwapStepTakesMidpointValueAtJumps) {
  const TargetStrategy t = testing::twap_target();
  EXPECT_DOUBLE_EQ(target_inventory(t, 0.0), 10.0);
  EXPECT_DOUBLE_EQ(target_inventory(t, 0.5), 9.5);
  EXPECT_DOUBLE_EQ(target_inventory(t, 1.0), 9.0);
  EXPECT_DOUBLE_EQ(target_inventory(t, 9.5), 0.5);
  EXPECT_DOUBLE_EQ(target_inventory(t, 10.0), 0.0);
  EXPECT_THROW(target_rate(t, 0.5), NotDifferentiable);
  EXPECT_FALSE(t.differentiable());
}

TEST(Targets, OutOfRangeTimeIsRejected) {
  const TargetStrategy t(10.0, DTwap{10.0});
  EXPECT_THROW(target_inventory(t, 10.5), DomainError);
  EXPECT_THROW(target_inventory(t, -0.1), DomainError);
}

TEST(Targets, SampledRateMustLiquidate) {
  EXPECT_THROW(TargetStrategy(1.0, SampledRate{1.0, {-1.0, -0.5}, std::nullopt}), DomainError);
  const TargetStrategy ok(1.0, SampledRate{1.0, {-1.5, -0.5}, std::nullopt});
  EXPECT_DOUBLE_EQ(target_inventory(ok, 0.25), 1.0 - 0.375);
  EXPECT_DOUBLE_EQ(target_inventory(ok, 1.0), 0.0);
}

TEST(Targets, ReferenceVwapLiquidatesTenShares) {
  const TargetStrategy t = vwap_reference_target();
  EXPECT_DOUBLE_EQ(t.initial_inventory(), 10.0);
  EXPECT_NEAR(target_inventory(t, 10.0), 0.0, 1e-9);
  EXPECT_FALSE(t.periods().has_value());
  // Rate regime switch at t = 3.
  const double trend = -15.0 / 370.0 * (2.95 - 7.0) * (2.95 - 7.0) - 0.5;
  EXPECT_NEAR(target_rate(t, 2.95), trend + 0.75 * std::cos(4.0 * std::numbers::pi * 2.95), 1e-3);
  EXPECT_THROW(periodic_residual(t), DomainError);
}

TEST(Targets, SamplingNeedsAlignedTwapGrid) {
  EXPECT_THROW(sample_inventory(testing::twap_target(), Grid(10.0, 15)), DomainError);
  EXPECT_THROW(sample_inventory(testing::twap_target(), Grid(5.0, 10)), GridMismatch);
  const GridFn r = sample_inventory(testing::twap_target(), Grid(10.0, 20));
  EXPECT_DOUBLE_EQ(r[1], 9.5);
  EXPECT_DOUBLE_EQ(r[2], 9.0);
  EXPECT_DOUBLE_EQ(r[3], 8.5);
}

TEST(PeriodicResidual, SawtoothShapeAndLimits) {
  const PeriodicResidual r = periodic_residual(testing::twap_target());
  EXPECT_EQ(r.periods(), 10);
  EXPECT_DOUBLE_EQ(r.period(), 1.0);
  EXPECT_NEAR(r(0.25), -0.25, 1e-12);
  EXPECT_NEAR(r(3.75), 0.25, 1e-12);
  EXPECT_DOUBLE_EQ(r.at_lattice(0, 4), 0.0);
  EXPECT_DOUBLE_EQ(r.at_lattice(8, 4), 0.0);
  EXPECT_NEAR(r.at_lattice(5, 4), -0.25, 1e-12);
  const auto [start, end] = r.boundary_limits();
  EXPECT_NEAR(start, -0.5, 1e-12);
  EXPECT_NEAR(end, 0.5, 1e-12);
}

TEST(PeriodicResidual, CosineResidualIsTheSine) {
  const PeriodicResidual r = periodic_residual(testing::cosine_target());
  for (double s : {0.1, 0.4, 0.9}) {
    EXPECT_NEAR(r(s + 3.0), testing::kCosineAmplitude * std::sin(2.0 * std::numbers::pi * s), 1e-12);
  }
  const auto [start, end] = r.boundary_limits();
  EXPECT_EQ(start, 0.0);
  EXPECT_EQ(end, 0.0);
}

}  // namespace
}  // namespace mmliq
