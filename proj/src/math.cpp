#include "sparkspread/math.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

#include "sparkspread/common.hpp"

namespace sparkspread {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double black_undiscounted(double fwd, double strike, double sigma, double dt) {
  require(fwd > 0.0, "black_undiscounted: forward must be positive");
  require(sigma >= 0.0, "black_undiscounted: sigma must be nonnegative");
  require(dt > 0.0, "black_undiscounted: dt must be positive");
  if (strike <= 0.0) return fwd - strike;
  const double sd = sigma * std::sqrt(dt);
  if (sd == 0.0) return std::max(fwd - strike, 0.0);
  const double d1 = std::log(fwd / strike) / sd + 0.5 * sd;
  return fwd * norm_cdf(d1) - strike * norm_cdf(d1 - sd);
}

double effective_sigma(double sigma1, double sigma2, double rho, double w) {
  const double v =
      sigma1 * sigma1 - 2.0 * rho * sigma1 * sigma2 * w + sigma2 * sigma2 * w * w;
  return std::sqrt(std::max(v, 0.0));
}

double neumaier_sum(std::span<const double> xs) {
  NeumaierAccumulator acc;
  for (double x : xs) acc.add(x);
  return acc.total();
}

namespace {

// Roots of the n-th physicists' Hermite polynomial by Newton iteration on
// the orthonormal three-term recurrence, marching inward from the largest
// root. Standard Numerical-Recipes-style starting guesses.
GaussHermiteRule build_gauss_hermite(int n) {
  constexpr double kEps = 3e-14;
  constexpr int kMaxNewton = 64;
  constexpr double kPiQuarterInv = 0.7511255444649425;  // pi^{-1/4}

  GaussHermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(n, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < kMaxNewton; ++it) {
      double p1 = kPiQuarterInv;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(double(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= kEps) break;
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  // Stored ascending so quadrature loops sweep the axis left to right.
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int n) {
  require(n >= 2, "gauss_hermite: need at least 2 nodes");
  static std::mutex mu;
  static std::unordered_map<int, GaussHermiteRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_hermite(n)).first;
  return it->second;
}

}  // namespace sparkspread
