#include "mmliq/closedform.hpp"

#include <cmath>
#include <numbers>

#include "mmliq/errors.hpp"

namespace mmliq {

namespace {

// sinh(x) e^{-x}, stable for large x.
double sinh_scaled(double x) { return -0.5 * std::expm1(-2.0 * x); }

// sinh(rate * x) / sinh(rate * T) * e^{rate (T - x)} written without overflow.
double sinh_ratio_scaled(double rate, double x, double T) {
  if (rate == 0.0) return T > 0.0 ? x / T : 0.0;
  return std::expm1(-2.0 * rate * x) / std::expm1(-2.0 * rate * T);
}

}  // namespace

NoGameConstants no_game_constants(const MarketParams& p) {
  p.validate();
  const double a = p.minor_temp_impact;
  const double lam = p.minor_perm_impact;
  return {std::sqrt(p.major_risk_aversion / p.major_temp_impact),
          std::sqrt(p.minor_risk_aversion / a),
          std::sqrt(p.minor_risk_aversion / a + lam * lam / (16.0 * a * a))};
}

GridFn no_interaction_major(const MarketParams& params, const TargetStrategy& target,
                            const Grid& grid) {
  const double theta = no_game_constants(params).major_rate;
  const GridFn r = sample_inventory(target, grid);
  const double q0 = target.initial_inventory();
  const double T = grid.horizon();
  const double h = grid.step();
  const std::size_t n = grid.nodes();
  const double decay = std::exp(-theta * h);

  // Left sums carry e^{-theta t_j}, right sums e^{-theta (T - t_j)}.
  std::vector<double> left(n, 0.0);
  std::vector<double> right(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    left[j] = decay * left[j - 1] + h * r[j] * sinh_scaled(theta * grid.time(j));
  }
  for (std::size_t j = n - 1; j-- > 0;) {
    right[j] = decay * right[j + 1] + h * r[j] * sinh_scaled(theta * (T - grid.time(j)));
  }
  // left[j] counts node 0 with weight h but sinh(0) = 0, so only the endpoint
  // j needs the half-weight correction.

  GridFn q(grid);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = grid.time(j);
    const double il = left[j] - 0.5 * h * r[j] * sinh_scaled(theta * t);
    const double ir = right[j] - 0.5 * h * r[j] * sinh_scaled(theta * (T - t));
    const double homogeneous = q0 * std::exp(-theta * t) * sinh_ratio_scaled(theta, T - t, T);
    q[j] = homogeneous + theta * (sinh_ratio_scaled(theta, T - t, T) * il +
                                  sinh_ratio_scaled(theta, t, T) * ir);
  }
  q[0] = q0;
  q[n - 1] = 0.0;
  return q;
}

double no_interaction_minor(const MarketParams& params, double q0_minor, double t) {
  const double T = params.horizon;
  if (t < 0.0 || t > T * (1.0 + 1e-12)) throw DomainError("time outside [0, T]");
  const double gamma = no_game_constants(params).minor_mf_rate;
  const double drift = params.minor_perm_impact / (4.0 * params.minor_temp_impact);
  // sinh(gamma (T - t)) / sinh(gamma T) = e^{-gamma t} * ratio
  return q0_minor * std::exp(-(drift + gamma) * t) * sinh_ratio_scaled(gamma, T - t, T);
}

double HarmonicCoeffs::major(double t) const {
  return major_sin * std::sin(omega * t) + major_cos * std::cos(omega * t);
}
double HarmonicCoeffs::minor(double t) const {
  return minor_sin * std::sin(omega * t) + minor_cos * std::cos(omega * t);
}
double HarmonicCoeffs::major_rate(double t) const {
  return omega * (major_sin * std::cos(omega * t) - major_cos * std::sin(omega * t));
}
double HarmonicCoeffs::minor_rate(double t) const {
  return omega * (minor_sin * std::cos(omega * t) - minor_cos * std::sin(omega * t));
}

HarmonicCoeffs cosine_periodic_components(const MarketParams& p, int periods, double amplitude) {
  p.validate();
  if (periods < 1) throw DomainError("periods must be >= 1");
  HarmonicCoeffs c{};
  c.omega = 2.0 * std::numbers::pi * periods / p.horizon;
  const double w2 = c.omega * c.omega;
  c.d0 = p.major_temp_impact * w2 + p.major_risk_aversion;
  c.d1 = p.minor_temp_impact * w2 + p.minor_risk_aversion;
  c.e0 = 0.5 * p.major_perm_impact * c.omega;
  c.e1 = 0.5 * p.minor_perm_impact * c.omega;
  const double d0 = c.d0, d1 = c.d1, e0 = c.e0, e1 = c.e1;
  c.K = d0 * d0 * d1 * d1 + 2.0 * d0 * d1 * e0 * e1 + d0 * d0 * e1 * e1 + e0 * e0 * e1 * e1;
  const double scale = amplitude * p.major_risk_aversion / c.K;
  c.major_sin = scale * (d0 * d1 * d1 + d1 * e0 * e1 + d0 * e1 * e1);
  c.major_cos = -scale * e0 * e1 * e1;
  c.minor_sin = -scale * d0 * e0 * e1;
  c.minor_cos = scale * e0 * (d0 * d1 + e0 * e1);
  return c;
}

RateAmplitudes rate_amplitude_phase(const MarketParams& p, int periods, double amplitude) {
  if (amplitude < 0.0) throw DomainError("cosine amplitude must be >= 0");
  const HarmonicCoeffs c = cosine_periodic_components(p, periods, amplitude);
  // rate = omega * (sin_coef cos(wt) - cos_coef sin(wt)) = A cos(wt - phase)
  auto fit = [&](double sin_coef, double cos_coef, const char* who) {
    const double along_cos = c.omega * sin_coef;
    const double along_sin = -c.omega * cos_coef;
    const double amp = std::hypot(along_cos, along_sin);
    if (amp == 0.0) throw DegeneratePhase(std::string(who) + " periodic rate is identically zero");
    return AmplitudePhase{amp, std::atan2(along_sin, along_cos)};
  };
  RateAmplitudes out{};
  out.major = fit(c.major_sin, c.major_cos, "major");
  out.minor = fit(c.minor_sin, c.minor_cos, "minor");
  out.major_nogame_amplitude = amplitude * p.major_risk_aversion * c.omega / c.d0;
  return out;
}

PriceAmplitudes price_periodic_amplitude(const MarketParams& p, int periods, double amplitude) {
  const HarmonicCoeffs c = cosine_periodic_components(p, periods, amplitude);
  const double b = std::abs(amplitude);
  const double lead = 2.0 * b * p.major_risk_aversion / (c.K * c.omega);
  PriceAmplitudes out{};
  out.equilibrium =
      lead * c.d1 * c.e0 * std::hypot(c.d0 * c.d1 + c.e0 * c.e1, c.d0 * c.e1);
  out.nogame = p.major_perm_impact * b * p.major_risk_aversion / c.d0;
  return out;
}

}  // namespace mmliq
