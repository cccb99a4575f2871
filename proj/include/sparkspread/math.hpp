#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace sparkspread {

double norm_pdf(double x);
double norm_cdf(double x);

// Undiscounted Black call on a forward: E[(X - k)^+] with X lognormal,
// E[X] = fwd, log-variance sigma^2 * dt. sigma = 0 collapses to the
// intrinsic value; k <= 0 means the option is always exercised.
double black_undiscounted(double fwd, double strike, double sigma, double dt);

// sqrt(s1^2 - 2*rho*s1*s2*w + s2^2*w^2), the volatility of a ratio of
// lognormals where the denominator carries weight w.
double effective_sigma(double sigma1, double sigma2, double rho, double w);

// Left-to-right sum with Neumaier's compensation. Order is part of the
// contract: callers that need reproducible totals pass a fixed ordering.
double neumaier_sum(std::span<const double> xs);

// Streaming form of the same accumulator.
class NeumaierAccumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double total() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Nodes and weights for integrating f(x)*exp(-x^2) over the real line
// (physicists' convention; weights sum to sqrt(pi)).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached per n; thread-safe. n must be >= 2.
const GaussHermiteRule& gauss_hermite(int n);

// E[g(Z)] for Z ~ N(0,1) via an n-point Gauss-Hermite rule.
template <class F>
double gauss_hermite_expectation(int n, F&& g) {
  static const double inv_sqrt_pi = 1.0 / std::sqrt(std::acos(-1.0));
  static const double sqrt2 = std::sqrt(2.0);
  const GaussHermiteRule& rule = gauss_hermite(n);
  std::vector<double> terms(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    terms[i] = rule.weights[i] * g(sqrt2 * rule.nodes[i]);
  }
  return inv_sqrt_pi * neumaier_sum(terms);
}

}  // namespace sparkspread
