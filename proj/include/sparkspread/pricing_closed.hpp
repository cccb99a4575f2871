#pragma once

#include <optional>

#include "sparkspread/models.hpp"

namespace sparkspread {

// Terminal spread-option terms: leg 1 is received (electricity forward),
// leg 2 is paid (heat-rate-scaled gas forward), k is the operating cost.
struct SpreadInputs {
  double x1 = 0.0;
  double x2 = 0.0;
  double k = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double rho = 0.0;
  double dt = 1.0;
  double r_f = 0.0;

  void validate() const;
};

struct BoundsResult {
  double lower = 0.0;
  double upper = 0.0;
  // The bounds are derived for a costless plant (K = 0). With K > 0 the
  // upper bound still dominates (the payoff only shrinks) but the lower
  // bound is no longer a bound; this flags that case.
  bool k_assumption_violated = false;
};

// Black-Scholes call on pre-paid forwards: fp_s*Phi(d1) - fp_k*Phi(d2).
double bs_call_prepaid(double fp_s, double fp_k, double sigma, double dt);

// Exchange option (zero-strike spread), undiscounted forward terms.
double margrabe(double x1, double x2, double sigma1, double sigma2, double rho,
                double dt);

// Kirk's approximation. The strike enters at its discounted value
// y = x2 + k*e^{-r_f dt}; the short leg carries weight w = x2/y inside the
// effective volatility. At k = 0 this is exactly margrabe().
double kirk_spread(const SpreadInputs& in);

// Distribution-free envelope from the forwards alone:
//   e^{-r_f (tau-t)} (F_e - heat_rate*F_g)^+  <=  V  <=  e^{-r_f (tau-t)} F_e.
// f_g is the raw gas forward; the heat rate is applied here.
BoundsResult deng_bounds(double f_e, double f_g, const Contract& c);

// Poisson-weighted Black-Scholes mixture for a call under lognormal
// jump-diffusion, forward basis. Weights use the jump-risk-adjusted
// intensity lambda' = lambda*(1+kappa); term n reprices the call at
// volatility sqrt(sigma^2 + n s^2/dt) with the drift shifted by
// -lambda*kappa*dt + n(m + s^2/2). Terms are added until the remaining
// weight mass drops below tail_tol.
double merton_series_forward(double fwd, double sigma, double lambda, double m,
                             double s, double strike, double dt, double r_f,
                             double tail_tol);

// Same series, spot basis: fwd = s0 e^{(r-q)dt}, discounting at p.r.
double merton_series_price(const MertonParams& p, double strike, double dt,
                           double tail_tol);

enum class LinearMap { identity, log };

// Prices the spread after collapsing the electricity leg onto the gas leg
// via the fitted linear relation F_e ~ a*map(F_g) + b. The effective
// underlying a*map(gas_forward) + b - heat_rate*gas_forward is then a
// single lognormal (or jump-diffusion) asset struck at the operating cost.
double linear_reduction_price(double a, double b, LinearMap map,
                              double gas_forward, double gas_sigma,
                              const Contract& c,
                              const std::optional<MertonParams>& jumps = {});

}  // namespace sparkspread
