#pragma once

#include <limits>
#include <vector>

#include "sparkspread/models.hpp"

namespace sparkspread {

// One (i, j) term of the two-asset jump mixture: conditional on i and j
// jumps, each leg is lognormal with jump-adjusted forward, volatility and
// correlation. weight is 0 for impossible counts (lambda == 0).
struct SeriesTerm {
  int i = 0;
  int j = 0;
  double weight = 0.0;
  double x1_tilde = 0.0;
  double x2_tilde = 0.0;
  double sigma1_tilde = 0.0;
  double sigma2_tilde = 0.0;
  double rho_tilde = 0.0;
  double term_price = 0.0;
};

SeriesTerm term_transform(const MertonParams& params_e,
                          const MertonParams& params_g, int i, int j,
                          double horizon, double rho);

// Exact bivariate-lognormal spread price by conditioning on the short leg:
// outer Gauss-Hermite integral over the short-leg Gaussian, inner
// conditional Black call in closed form. Prices the same contract as
// kirk_spread (strike enters at its discounted value k*e^{-r_f dt}).
double spread_price_quadrature(double x1, double x2, double k, double sigma1,
                               double sigma2, double rho, double dt, double r_f,
                               int n_nodes);

enum class InnerPricer { kirk, quadrature };

// Controls the anti-diagonal expansion of the double series.
struct TruncationPolicy {
  double stop_tol = 1e-6;        // threshold on |V_d - V_{d-1}|
  int max_diagonal = 60;         // hard stop
  double weight_tail_tol = 1e-8; // bound on (max term price) x dropped mass
  int quadrature_nodes = 64;

  void validate() const;
};

TruncationPolicy adaptive_truncation(double stop_tol, int max_diagonal,
                                     double weight_tail_tol,
                                     int quadrature_nodes = 64);

struct ConvergenceReport {
  int terms_evaluated = 0;
  int final_diagonal = -1;
  std::vector<double> error_sequence;  // |V_d - V_{d-1}| for d = 1, 2, ...
  double tail_mass_bound = 1.0;        // dropped Poisson((l1+l2)T) mass
  double tail_price_bound = std::numeric_limits<double>::infinity();
  bool converged = false;
};

struct SeriesPrice {
  double price = 0.0;
  ConvergenceReport report;
};

// Poisson-weighted mixture over jump counts (i, j), expanded by full
// anti-diagonals i + j = d. After each diagonal the controller checks the
// stop_tol on successive partial sums and a rigorous tail bound (running
// max of the inner prices times the dropped Poisson mass). Non-convergence
// within max_diagonal is reported, never thrown: the partial sum and tail
// bound come back with converged = false.
SeriesPrice jump_series_price(const MertonParams& params_e,
                              const MertonParams& params_g, double rho,
                              double k, double horizon, double r_f,
                              InnerPricer inner, const TruncationPolicy& policy);

}  // namespace sparkspread
