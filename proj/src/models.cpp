#include "sparkspread/models.hpp"

#include <algorithm>
#include <cmath>

#include "sparkspread/common.hpp"

namespace sparkspread {

namespace {
constexpr double kTwoPi = 6.283185307179586;
}

double SeasonalFunction::operator()(double t) const {
  double v = c0 + c1 * t;
  for (const Harmonic& h : harmonics) {
    v += h.amplitude * std::sin(kTwoPi * t / h.period + h.phase);
  }
  return v;
}

void SeasonalFunction::validate() const {
  for (const Harmonic& h : harmonics) {
    require(h.period > 0.0, "seasonal: harmonic period must be positive");
  }
}

double seasonal_eval(const SeasonalFunction& fn, double t) {
  fn.validate();
  return fn(t);
}

OUMoments ou_moments(double alpha, double sigma, double x0, double t) {
  require(alpha > 0.0, "ou_moments: alpha must be positive");
  require(sigma >= 0.0, "ou_moments: sigma must be nonnegative");
  require(t >= 0.0, "ou_moments: horizon must be nonnegative");
  OUMoments m;
  m.mean = x0 * std::exp(-alpha * t);
  m.variance = sigma * sigma * (1.0 - std::exp(-2.0 * alpha * t)) / (2.0 * alpha);
  return m;
}

void TwoFactorJumpParams::validate() const {
  seasonal.validate();
  require(alpha > 0.0, "two_factor: alpha must be positive");
  require(beta > 0.0, "two_factor: beta must be positive");
  require(beta >= alpha,
          "two_factor: beta must be at least alpha (spikes revert faster)");
  require(sigma >= 0.0, "two_factor: sigma must be nonnegative");
  require(eta >= 0.0, "two_factor: eta must be nonnegative");
  require(jump_intensity >= 0.0, "two_factor: jump_intensity must be nonnegative");
  require(jump_sd >= 0.0, "two_factor: jump_sd must be nonnegative");
}

void MertonParams::validate() const {
  require(s0 > 0.0, "merton: s0 must be positive");
  require(sigma >= 0.0, "merton: sigma must be nonnegative");
  require(lambda >= 0.0, "merton: lambda must be nonnegative");
  require(s >= 0.0, "merton: s must be nonnegative");
}

double MertonParams::kappa() const { return std::exp(m + 0.5 * s * s) - 1.0; }

double MertonParams::forward(double dt) const {
  return s0 * std::exp((r - q) * dt);
}

double merton_kappa(const MertonParams& p) {
  p.validate();
  return p.kappa();
}

void Contract::validate() const {
  require(t < tau, "contract: valuation time t must precede maturity tau");
  require(tau <= tau1, "contract: tau must not exceed delivery start tau1");
  require(tau1 < tau2, "contract: tau1 must precede tau2");
  require(heat_rate > 0.0, "contract: heat_rate must be positive");
  require(cost >= 0.0, "contract: cost must be nonnegative");
  require(grid_step > 0.0, "contract: grid_step must be positive");
  const double steps = (tau2 - tau1) / grid_step;
  const double whole = std::round(steps);
  require(whole >= 1.0 && std::abs(steps - whole) <= 1e-6 * std::max(1.0, steps),
          "contract: grid_step must divide [tau1, tau2] into a whole number of steps");
}

}  // namespace sparkspread
