#include "sparkspread/pricing_closed.hpp"

#include <cmath>

#include "sparkspread/common.hpp"
#include "sparkspread/math.hpp"

namespace sparkspread {

void SpreadInputs::validate() const {
  require(x1 > 0.0 && x2 > 0.0, "spread: legs must be positive");
  require(k >= 0.0, "spread: strike must be nonnegative");
  require(sigma1 >= 0.0 && sigma2 >= 0.0, "spread: volatilities must be nonnegative");
  require(std::abs(rho) <= 1.0, "spread: rho must lie in [-1, 1]");
  require(dt > 0.0, "spread: dt must be positive");
}

double bs_call_prepaid(double fp_s, double fp_k, double sigma, double dt) {
  require(fp_s > 0.0 && fp_k > 0.0, "bs_call_prepaid: forwards must be positive");
  return black_undiscounted(fp_s, fp_k, sigma, dt);
}

double margrabe(double x1, double x2, double sigma1, double sigma2, double rho,
                double dt) {
  require(x1 > 0.0 && x2 > 0.0, "margrabe: legs must be positive");
  require(sigma1 >= 0.0 && sigma2 >= 0.0, "margrabe: volatilities must be nonnegative");
  require(std::abs(rho) <= 1.0, "margrabe: rho must lie in [-1, 1]");
  require(dt > 0.0, "margrabe: dt must be positive");
  const double sig = effective_sigma(sigma1, sigma2, rho, x2 / x2);
  return black_undiscounted(x1, x2, sig, dt);
}

double kirk_spread(const SpreadInputs& in) {
  in.validate();
  const double df = std::exp(-in.r_f * in.dt);
  const double y = in.x2 + in.k * df;
  const double w = in.x2 / y;
  const double sig = effective_sigma(in.sigma1, in.sigma2, in.rho, w);
  return df * black_undiscounted(in.x1, y, sig, in.dt);
}

BoundsResult deng_bounds(double f_e, double f_g, const Contract& c) {
  c.validate();
  require(f_e >= 0.0 && f_g >= 0.0, "deng_bounds: forwards must be nonnegative");
  const double df = std::exp(-c.r_f * c.maturity_span());
  BoundsResult b;
  b.lower = df * std::max(f_e - c.heat_rate * f_g, 0.0);
  b.upper = df * f_e;
  b.k_assumption_violated = c.cost > 0.0;
  return b;
}

double merton_series_forward(double fwd, double sigma, double lambda, double m,
                             double s, double strike, double dt, double r_f,
                             double tail_tol) {
  require(fwd > 0.0, "merton_series: forward must be positive");
  require(strike > 0.0, "merton_series: strike must be positive");
  require(sigma >= 0.0 && lambda >= 0.0 && s >= 0.0,
          "merton_series: sigma, lambda, s must be nonnegative");
  require(dt > 0.0, "merton_series: dt must be positive");
  require(tail_tol > 0.0 && tail_tol < 1.0,
          "merton_series: tail_tol must lie in (0, 1)");

  const double df = std::exp(-r_f * dt);
  const double kappa = std::exp(m + 0.5 * s * s) - 1.0;
  const double rate = lambda * (1.0 + kappa) * dt;  // lambda' dt
  if (rate == 0.0) {
    return bs_call_prepaid(fwd * df, strike * df, sigma, dt);
  }

  const double log_rate = std::log(rate);
  NeumaierAccumulator total;
  double weight_mass = 0.0;
  constexpr int kHardCap = 400;
  int n = 0;
  for (; n < kHardCap; ++n) {
    const double log_w = -rate + n * log_rate - std::lgamma(n + 1.0);
    const double w = std::exp(log_w);
    // term n discounts its strike at the shifted rate
    // r_n = r_f - lambda*kappa + n(m + s^2/2)/dt; the asset leg is the
    // plain pre-paid forward, constant across terms
    const double disc_n =
        df * std::exp(lambda * kappa * dt - n * (m + 0.5 * s * s));
    const double sigma_n = std::sqrt(sigma * sigma + n * s * s / dt);
    const double term = bs_call_prepaid(fwd * df, strike * disc_n, sigma_n, dt);
    total.add(w * term);
    weight_mass += w;
    if (1.0 - weight_mass < tail_tol) break;
  }
  if (n >= kHardCap) {
    throw ConvergenceError("merton_series: weight mass did not reach tail_tol "
                           "within the term cap");
  }
  return total.total();
}

double merton_series_price(const MertonParams& p, double strike, double dt,
                           double tail_tol) {
  p.validate();
  return merton_series_forward(p.forward(dt), p.sigma, p.lambda, p.m, p.s,
                               strike, dt, p.r, tail_tol);
}

double linear_reduction_price(double a, double b, LinearMap map,
                              double gas_forward, double gas_sigma,
                              const Contract& c,
                              const std::optional<MertonParams>& jumps) {
  c.validate();
  require(gas_forward > 0.0, "linear_reduction: gas forward must be positive");
  require(gas_sigma >= 0.0, "linear_reduction: gas sigma must be nonnegative");

  const double mapped =
      map == LinearMap::identity ? gas_forward : std::log(gas_forward);
  const double s_hat = a * mapped + b - c.heat_rate * gas_forward;
  require(s_hat > 0.0,
          "linear_reduction: effective underlying a*map(F_g) + b - "
          "heat_rate*F_g must be positive");

  const double span = c.maturity_span();
  const double df = std::exp(-c.r_f * span);
  if (c.cost == 0.0) return df * s_hat;  // zero-strike call on the proxy
  if (jumps.has_value() && jumps->lambda > 0.0) {
    return merton_series_forward(s_hat, gas_sigma, jumps->lambda, jumps->m,
                                 jumps->s, c.cost, span, c.r_f, 1e-10);
  }
  return bs_call_prepaid(s_hat * df, c.cost * df, gas_sigma, span);
}

}  // namespace sparkspread
