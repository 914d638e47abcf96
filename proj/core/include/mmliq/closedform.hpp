#pragma once

#include "mmliq/grid.hpp"
#include "mmliq/model.hpp"

namespace mmliq {

// Decay rates of the interaction-free problems (1/time).
struct NoGameConstants {
  double major_rate;     // sqrt(phi0 / a0)
  double minor_rate;     // sqrt(phi / a)
  double minor_mf_rate;  // sqrt(phi / a + lambda^2 / (16 a^2)), >= minor_rate
};

NoGameConstants no_game_constants(const MarketParams& params);

// Coefficients of the unique periodic response to a cosine target
// q0 (1 - t/T) + b sin(omega t):
//   major residual  = major_sin sin(omega t) + major_cos cos(omega t)
//   minor inventory = minor_sin sin(omega t) + minor_cos cos(omega t)
struct HarmonicCoeffs {
  double omega;
  double d0, d1;  // a0 omega^2 + phi0, a omega^2 + phi
  double e0, e1;  // lambda0 omega / 2, lambda omega / 2
  double K;       // common denominator, > 0 whenever d0, d1 > 0
  double major_sin, major_cos;
  double minor_sin, minor_cos;

  double major(double t) const;
  double minor(double t) const;
  double major_rate(double t) const;
  double minor_rate(double t) const;
};

struct AmplitudePhase {
  double amplitude;  // >= 0
  double phase;      // radians; series = amplitude * cos(omega t - phase)
};

struct RateAmplitudes {
  AmplitudePhase major;
  AmplitudePhase minor;
  double major_nogame_amplitude;
};

struct PriceAmplitudes {
  double equilibrium;
  double nogame;
};

// Optimal major inventory when the minors' impact on her is switched off.
// The Green's-function integral uses the composite trapezoid rule on `grid`,
// so TWAP jump times must lie on nodes.
GridFn no_interaction_major(const MarketParams& params, const TargetStrategy& target,
                            const Grid& grid);

// Mean-field minor inventory when the major's impact is switched off and every
// minor starts from the same deterministic inventory.
double no_interaction_minor(const MarketParams& params, double q0_minor, double t);

HarmonicCoeffs cosine_periodic_components(const MarketParams& params, int periods,
                                          double amplitude);

// Phases follow the cosine convention: phi_major in [0, pi/2],
// phi_minor in [-pi, -pi/2]. Throws DegeneratePhase when a component vanishes.
RateAmplitudes rate_amplitude_phase(const MarketParams& params, int periods, double amplitude);

PriceAmplitudes price_periodic_amplitude(const MarketParams& params, int periods,
                                         double amplitude);

}  // namespace mmliq
