#include "sparkspread/pricing_series.hpp"

#include <algorithm>
#include <cmath>

#include "sparkspread/common.hpp"
#include "sparkspread/math.hpp"
#include "sparkspread/pricing_closed.hpp"

namespace sparkspread {

namespace {

constexpr double kSqrtPi = 1.7724538509055159;
constexpr double kSqrt2 = 1.4142135623730951;

double poisson_pmf(double mean, int n) {
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
}

}  // namespace

SeriesTerm term_transform(const MertonParams& params_e,
                          const MertonParams& params_g, int i, int j,
                          double horizon, double rho) {
  params_e.validate();
  params_g.validate();
  require(i >= 0 && j >= 0, "term_transform: jump counts must be nonnegative");
  require(horizon > 0.0, "term_transform: horizon must be positive");
  require(std::abs(rho) <= 1.0, "term_transform: rho must lie in [-1, 1]");

  const double T = horizon;
  SeriesTerm t;
  t.i = i;
  t.j = j;

  if ((params_e.lambda == 0.0 && i > 0) || (params_g.lambda == 0.0 && j > 0)) {
    t.weight = 0.0;
  } else {
    double log_w = -(params_e.lambda + params_g.lambda) * T;
    if (i > 0) log_w += i * std::log(params_e.lambda * T) - std::lgamma(i + 1.0);
    if (j > 0) log_w += j * std::log(params_g.lambda * T) - std::lgamma(j + 1.0);
    t.weight = std::exp(log_w);
  }

  // Conditional on i jumps the forward picks up the compensator e^{-l k T}
  // and one factor e^{m + s^2/2} per jump, keeping the mixture mean at the
  // unconditional forward.
  t.x1_tilde = params_e.forward(T) *
               std::exp(-params_e.lambda * params_e.kappa() * T +
                        i * (params_e.m + 0.5 * params_e.s * params_e.s));
  t.x2_tilde = params_g.forward(T) *
               std::exp(-params_g.lambda * params_g.kappa() * T +
                        j * (params_g.m + 0.5 * params_g.s * params_g.s));
  t.sigma1_tilde =
      std::sqrt(params_e.sigma * params_e.sigma + i * params_e.s * params_e.s / T);
  t.sigma2_tilde =
      std::sqrt(params_g.sigma * params_g.sigma + j * params_g.s * params_g.s / T);
  // Only the Brownian parts are correlated, so the correlation shrinks as
  // jump variance is mixed in.
  if (t.sigma1_tilde > 0.0 && t.sigma2_tilde > 0.0) {
    t.rho_tilde =
        rho * params_e.sigma * params_g.sigma / (t.sigma1_tilde * t.sigma2_tilde);
  } else {
    t.rho_tilde = 0.0;
  }
  return t;
}

double spread_price_quadrature(double x1, double x2, double k, double sigma1,
                               double sigma2, double rho, double dt, double r_f,
                               int n_nodes) {
  require(x1 > 0.0 && x2 > 0.0, "spread quadrature: legs must be positive");
  require(k >= 0.0, "spread quadrature: strike must be nonnegative");
  require(sigma1 >= 0.0 && sigma2 >= 0.0,
          "spread quadrature: volatilities must be nonnegative");
  require(std::abs(rho) <= 1.0, "spread quadrature: rho must lie in [-1, 1]");
  require(dt > 0.0, "spread quadrature: dt must be positive");
  require(n_nodes >= 8, "spread quadrature: node count too small");

  const double df = std::exp(-r_f * dt);
  const double k_eff = k * df;
  if (sigma2 == 0.0) {
    // degenerate outer law: the short leg is deterministic
    return df * black_undiscounted(x1, x2 + k_eff, sigma1, dt);
  }

  const double sqdt = std::sqrt(dt);
  const double sigma_perp = sigma1 * std::sqrt(std::max(1.0 - rho * rho, 0.0));
  const GaussHermiteRule& rule = gauss_hermite(n_nodes);

  std::vector<double> vals(rule.nodes.size());
  for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
    const double z = kSqrt2 * rule.nodes[a];
    const double x2_z = x2 * std::exp(sigma2 * sqdt * z - 0.5 * sigma2 * sigma2 * dt);
    // conditional mean of the long leg given the short-leg Gaussian
    const double m1 = x1 * std::exp(rho * sigma1 * sqdt * z -
                                    0.5 * rho * rho * sigma1 * sigma1 * dt);
    vals[a] = rule.weights[a] * black_undiscounted(m1, x2_z + k_eff, sigma_perp, dt);
  }
  const double mean = neumaier_sum(vals) / kSqrtPi;
  require(std::isfinite(mean), "spread quadrature: non-finite intermediate value");
  return df * mean;
}

void TruncationPolicy::validate() const {
  require(stop_tol > 0.0, "truncation: stop_tol must be positive");
  require(max_diagonal >= 1, "truncation: max_diagonal must be at least 1");
  require(weight_tail_tol > 0.0 && weight_tail_tol < 1.0,
          "truncation: weight_tail_tol must lie in (0, 1)");
  require(quadrature_nodes >= 8, "truncation: node count too small");
}

TruncationPolicy adaptive_truncation(double stop_tol, int max_diagonal,
                                     double weight_tail_tol,
                                     int quadrature_nodes) {
  TruncationPolicy p;
  p.stop_tol = stop_tol;
  p.max_diagonal = max_diagonal;
  p.weight_tail_tol = weight_tail_tol;
  p.quadrature_nodes = quadrature_nodes;
  p.validate();
  return p;
}

SeriesPrice jump_series_price(const MertonParams& params_e,
                              const MertonParams& params_g, double rho,
                              double k, double horizon, double r_f,
                              InnerPricer inner,
                              const TruncationPolicy& policy) {
  params_e.validate();
  params_g.validate();
  policy.validate();
  require(k >= 0.0, "jump_series_price: strike must be nonnegative");
  require(horizon > 0.0, "jump_series_price: horizon must be positive");
  require(std::abs(rho) <= 1.0, "jump_series_price: rho must lie in [-1, 1]");

  auto price_term = [&](const SeriesTerm& t) {
    if (inner == InnerPricer::quadrature) {
      return spread_price_quadrature(t.x1_tilde, t.x2_tilde, k, t.sigma1_tilde,
                                     t.sigma2_tilde, t.rho_tilde, horizon, r_f,
                                     policy.quadrature_nodes);
    }
    SpreadInputs si;
    si.x1 = t.x1_tilde;
    si.x2 = t.x2_tilde;
    si.k = k;
    si.sigma1 = t.sigma1_tilde;
    si.sigma2 = t.sigma2_tilde;
    si.rho = t.rho_tilde;
    si.dt = horizon;
    si.r_f = r_f;
    return kirk_spread(si);
  };

  const double mass_mean = (params_e.lambda + params_g.lambda) * horizon;
  NeumaierAccumulator total;
  SeriesPrice out;
  ConvergenceReport& rep = out.report;
  double prev_v = 0.0;
  double max_price = 0.0;
  double included_mass = 0.0;

  for (int d = 0; d <= policy.max_diagonal; ++d) {
    for (int i = d; i >= 0; --i) {
      const int j = d - i;
      if ((params_e.lambda == 0.0 && i > 0) ||
          (params_g.lambda == 0.0 && j > 0)) {
        continue;
      }
      SeriesTerm t = term_transform(params_e, params_g, i, j, horizon, rho);
      t.term_price = price_term(t);
      max_price = std::max(max_price, t.term_price);
      total.add(t.weight * t.term_price);
      ++rep.terms_evaluated;
    }
    included_mass += poisson_pmf(mass_mean, d);
    rep.final_diagonal = d;
    rep.tail_mass_bound = std::clamp(1.0 - included_mass, 0.0, 1.0);
    rep.tail_price_bound = max_price * rep.tail_mass_bound;
    const double v = total.total();
    if (d >= 1) rep.error_sequence.push_back(std::abs(v - prev_v));
    prev_v = v;
    if (rep.tail_mass_bound == 0.0 ||
        (d >= 1 && rep.error_sequence.back() <= policy.stop_tol &&
         rep.tail_price_bound <= policy.weight_tail_tol)) {
      rep.converged = true;
      break;
    }
  }
  out.price = total.total();
  return out;
}

}  // namespace sparkspread
