#pragma once

#include <vector>

namespace sparkspread {

struct Harmonic {
  double amplitude = 0.0;
  double period = 1.0;  // years
  double phase = 0.0;   // radians
};

// Deterministic seasonal level:
//   c0 + c1*t + sum_k amplitude_k * sin(2*pi*t/period_k + phase_k)
struct SeasonalFunction {
  double c0 = 0.0;
  double c1 = 0.0;
  std::vector<Harmonic> harmonics;

  double operator()(double t) const;
  void validate() const;
};

double seasonal_eval(const SeasonalFunction& fn, double t);

struct OUMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Transition law of dX = -alpha*X dt + sigma dW over horizon t from X(0)=x0:
// exact mean x0*e^{-alpha t}, variance sigma^2 (1-e^{-2 alpha t})/(2 alpha).
OUMoments ou_moments(double alpha, double sigma, double x0, double t);

// One commodity of the two-factor spot model: a seasonal level plus a
// mean-reverting diffusion factor X (alpha, sigma) plus a fast-reverting
// spike factor Y (beta) driven by compound-Poisson jumps of size
// eta * N(jump_mean, jump_sd^2) arriving at rate jump_intensity.
// Electricity uses the arithmetic form S = seasonal + X + Y (spot may go
// negative); gas uses the geometric form ln S = ln(seasonal) + X + Y.
struct TwoFactorJumpParams {
  double alpha = 1.0;
  double sigma = 0.0;
  double beta = 1.0;
  double eta = 1.0;
  double jump_intensity = 0.0;
  double jump_mean = 0.0;
  double jump_sd = 0.0;
  SeasonalFunction seasonal;
  double x0 = 0.0;
  double y0 = 0.0;

  void validate() const;
};

// Lognormal jump-diffusion spot:
//   dS/S = (r - q - lambda*kappa) dt + sigma dW + (e^J - 1) dN,
// J ~ N(m, s^2), kappa = E[e^J] - 1. The compensator keeps
// E[S(T)] = s0 * e^{(r-q)T}.
struct MertonParams {
  double s0 = 1.0;
  double r = 0.0;
  double q = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  double m = 0.0;
  double s = 0.0;

  void validate() const;
  double kappa() const;
  double forward(double dt) const;  // s0 * e^{(r-q) dt}
};

double merton_kappa(const MertonParams& p);

// Spark-spread option terms. The option pays
//   e^{-r_f (tau - t)} * (F_e - heat_rate * F_g - cost)^+
// at tau on forwards averaged over the delivery window [tau1, tau2].
struct Contract {
  double t = 0.0;
  double tau = 1.0;
  double tau1 = 1.0;
  double tau2 = 1.0;
  double heat_rate = 1.0;  // gas units burned per unit of power
  double cost = 0.0;       // non-fuel operating cost, acts as the strike
  double r_f = 0.0;
  double grid_step = 1.0 / 365.0;  // spacing of the delivery-window grid

  void validate() const;
  double maturity_span() const { return tau - t; }
};

}  // namespace sparkspread
