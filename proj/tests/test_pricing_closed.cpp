#include <doctest.h>

#include <cmath>
#include <optional>

#include "sparkspread/common.hpp"
#include "sparkspread/models.hpp"
#include "sparkspread/pricing_closed.hpp"
#include "sparkspread/rng.hpp"

using namespace sparkspread;

namespace {

SpreadInputs base_inputs() {
  SpreadInputs si;
  si.x1 = 100.0;
  si.x2 = 90.0;
  si.k = 5.0;
  si.sigma1 = 0.3;
  si.sigma2 = 0.2;
  si.rho = 0.4;
  si.dt = 1.0;
  si.r_f = 0.05;
  return si;
}

Contract window_contract(double r_f, double cost) {
  Contract c;
  c.t = 0.0;
  c.tau = c.tau1 = 1.0;
  c.tau2 = 1.0 + 10.0 / 365.0;
  c.r_f = r_f;
  c.cost = cost;
  return c;
}

}  // namespace

TEST_CASE("prepaid-forward call") {
  // sigma -> 0 keeps only the intrinsic value
  CHECK(bs_call_prepaid(110.0, 100.0, 0.0, 1.0) == 10.0);
  CHECK(bs_call_prepaid(110.0, 100.0, 1e-12, 1.0) ==
        doctest::Approx(10.0).epsilon(1e-12));
  CHECK(bs_call_prepaid(100.0, 100.0, 0.2, 1.0) ==
        doctest::Approx(7.965567455405804).epsilon(1e-12));
  // vanishing strike leaves the asset itself
  CHECK(bs_call_prepaid(100.0, 1e-12, 0.2, 1.0) ==
        doctest::Approx(100.0).epsilon(1e-9));
  CHECK_THROWS_AS(bs_call_prepaid(0.0, 100.0, 0.2, 1.0), ValidationError);
  CHECK_THROWS_AS(bs_call_prepaid(100.0, 0.0, 0.2, 1.0), ValidationError);
  CHECK_THROWS_AS(bs_call_prepaid(100.0, 100.0, 0.2, 0.0), ValidationError);

  double prev = bs_call_prepaid(100.0, 50.0, 0.25, 2.0);
  for (double k = 60.0; k <= 200.0; k += 10.0) {
    const double v = bs_call_prepaid(100.0, k, 0.25, 2.0);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("exchange option") {
  // equal vols at full correlation: spread is deterministic
  CHECK(margrabe(100.0, 95.0, 0.2, 0.2, 1.0, 1.0) == doctest::Approx(5.0));
  CHECK(margrabe(95.0, 100.0, 0.2, 0.2, 1.0, 1.0) == doctest::Approx(0.0));
  // exchanging against (almost) nothing is worth the long leg
  CHECK(margrabe(100.0, 1e-12, 0.25, 0.15, 0.3, 0.5) ==
        doctest::Approx(100.0).epsilon(1e-9));
  // bivariate-lognormal quadrature reference
  CHECK(margrabe(100.0, 95.0, 0.25, 0.15, 0.3, 0.5) ==
        doctest::Approx(9.653359842157869).epsilon(1e-12));
  CHECK_THROWS_AS(margrabe(100.0, 95.0, 0.25, 0.15, 1.5, 0.5), ValidationError);
}

TEST_CASE("kirk approximation") {
  SpreadInputs si = base_inputs();
  CHECK(kirk_spread(si) == doctest::Approx(13.12974123415554).epsilon(1e-12));

  SUBCASE("zero strike is exactly the exchange option") {
    RandomStream rs(314, 0);
    for (int i = 0; i < 200; ++i) {
      SpreadInputs z;
      z.x1 = 10.0 + 190.0 * rs.uniform();
      z.x2 = 10.0 + 190.0 * rs.uniform();
      z.sigma1 = 0.05 + 0.55 * rs.uniform();
      z.sigma2 = 0.05 + 0.55 * rs.uniform();
      z.rho = -0.9 + 1.8 * rs.uniform();
      z.dt = 0.1 + 1.9 * rs.uniform();
      z.k = 0.0;
      z.r_f = 0.0;  // margrabe quotes the prepaid (undiscounted) price
      CHECK(kirk_spread(z) ==
            margrabe(z.x1, z.x2, z.sigma1, z.sigma2, z.rho, z.dt));
    }
  }

  SUBCASE("zero strike with discounting scales the exchange option") {
    SpreadInputs z = base_inputs();
    z.k = 0.0;
    const double df = std::exp(-z.r_f * z.dt);
    CHECK(kirk_spread(z) ==
          doctest::Approx(df * margrabe(z.x1, z.x2, z.sigma1, z.sigma2, z.rho,
                                        z.dt))
              .epsilon(1e-15));
  }

  SUBCASE("deterministic short leg reduces to a single-asset call") {
    si.sigma2 = 0.0;
    const double df = std::exp(-si.r_f * si.dt);
    const double strike = si.x2 + si.k * df;
    const double expected =
        bs_call_prepaid(si.x1 * df, strike * df, si.sigma1, si.dt);
    CHECK(kirk_spread(si) == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("monotone in each leg and the strike") {
    double prev = kirk_spread(si);
    for (double k = 6.0; k <= 30.0; k += 4.0) {
      SpreadInputs s = si;
      s.k = k;
      const double v = kirk_spread(s);
      CHECK(v <= prev);
      prev = v;
    }
    prev = 0.0;
    for (double x1 = 60.0; x1 <= 160.0; x1 += 10.0) {
      SpreadInputs s = si;
      s.x1 = x1;
      const double v = kirk_spread(s);
      CHECK(v >= prev);
      prev = v;
    }
    prev = 1e300;
    for (double x2 = 60.0; x2 <= 160.0; x2 += 10.0) {
      SpreadInputs s = si;
      s.x2 = x2;
      const double v = kirk_spread(s);
      CHECK(v <= prev);
      prev = v;
    }
  }

  SUBCASE("input checks") {
    SpreadInputs bad = si;
    bad.x1 = 0.0;
    CHECK_THROWS_AS(kirk_spread(bad), ValidationError);
    bad = si;
    bad.x2 = -1.0;
    CHECK_THROWS_AS(kirk_spread(bad), ValidationError);
    bad = si;
    bad.rho = 1.2;
    CHECK_THROWS_AS(kirk_spread(bad), ValidationError);
    bad = si;
    bad.dt = 0.0;
    CHECK_THROWS_AS(kirk_spread(bad), ValidationError);
    bad = si;
    bad.k = -2.0;
    CHECK_THROWS_AS(kirk_spread(bad), ValidationError);
  }
}

TEST_CASE("forward envelope") {
  Contract c = window_contract(0.0, 0.0);
  const BoundsResult b = deng_bounds(100.0, 80.0, c);
  CHECK(b.lower == doctest::Approx(20.0));
  CHECK(b.upper == doctest::Approx(100.0));
  CHECK_FALSE(b.k_assumption_violated);

  // out-of-the-money forward spread clamps the lower bound at zero
  const BoundsResult otm = deng_bounds(70.0, 80.0, c);
  CHECK(otm.lower == 0.0);
  CHECK(otm.upper == doctest::Approx(70.0));

  // discounting over tau - t and the heat-rate scaling of the gas leg
  Contract cd = window_contract(0.05, 0.0);
  cd.heat_rate = 2.0;
  const BoundsResult d = deng_bounds(100.0, 30.0, cd);
  const double df = std::exp(-0.05);
  CHECK(d.lower == doctest::Approx(df * 40.0).epsilon(1e-14));
  CHECK(d.upper == doctest::Approx(df * 100.0).epsilon(1e-14));
  CHECK(d.lower <= d.upper);
  CHECK(d.lower >= 0.0);

  // a positive operating cost voids the lower-bound assumption
  const BoundsResult flagged = deng_bounds(100.0, 80.0, window_contract(0.0, 5.0));
  CHECK(flagged.k_assumption_violated);

  CHECK_THROWS_AS(deng_bounds(-1.0, 80.0, c), ValidationError);
  CHECK_THROWS_AS(deng_bounds(100.0, -1.0, c), ValidationError);
}

TEST_CASE("poisson-weighted call mixture") {
  MertonParams p;
  p.s0 = 100.0;
  p.r = 0.05;
  p.sigma = 0.2;

  SUBCASE("no jumps collapses to the plain call") {
    const double plain = bs_call_prepaid(100.0 * std::exp(0.05) * std::exp(-0.05),
                                         100.0 * std::exp(-0.05), 0.2, 1.0);
    CHECK(merton_series_price(p, 100.0, 1.0, 1e-12) ==
          doctest::Approx(plain).epsilon(1e-13));
  }

  SUBCASE("unit-ratio jumps change nothing") {
    MertonParams j = p;
    j.lambda = 2.0;
    j.m = 0.0;
    j.s = 0.0;
    CHECK(merton_series_price(j, 100.0, 1.0, 1e-12) ==
          doctest::Approx(merton_series_price(p, 100.0, 1.0, 1e-12))
              .epsilon(1e-10));
  }

  SUBCASE("jump-diffusion reference value") {
    MertonParams j = p;
    j.lambda = 0.5;
    j.m = -0.1;
    j.s = 0.15;
    CHECK(merton_series_price(j, 100.0, 1.0, 1e-10) ==
          doctest::Approx(11.661674787503706).epsilon(1e-9));
  }

  SUBCASE("continuous in the intensity at zero") {
    MertonParams j = p;
    j.m = -0.1;
    j.s = 0.15;
    const double at0 = merton_series_price(p, 100.0, 1.0, 1e-12);
    j.lambda = 1e-8;
    const double near0 = merton_series_price(j, 100.0, 1.0, 1e-12);
    CHECK(std::abs(near0 - at0) < 1e-6 * at0);
  }

  SUBCASE("monotone in the strike") {
    MertonParams j = p;
    j.lambda = 0.7;
    j.m = 0.05;
    j.s = 0.2;
    double prev = merton_series_price(j, 50.0, 1.0, 1e-12);
    for (double k = 60.0; k <= 180.0; k += 10.0) {
      const double v = merton_series_price(j, k, 1.0, 1e-12);
      CHECK(v <= prev);
      prev = v;
    }
  }

  SUBCASE("input checks and term budget") {
    CHECK_THROWS_AS(merton_series_price(p, 100.0, 1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(merton_series_price(p, 100.0, 1.0, 1.0), ValidationError);
    MertonParams wild = p;
    wild.lambda = 600.0;  // needs more terms than the hard cap allows
    wild.m = 0.1;
    wild.s = 0.2;
    CHECK_THROWS_AS(merton_series_price(wild, 100.0, 1.0, 1e-12),
                    ConvergenceError);
  }
}

TEST_CASE("single-asset reduction of the spread") {
  Contract c = window_contract(0.03, 20.0);
  c.t = 0.5;
  c.heat_rate = 0.8;

  SUBCASE("deterministic intrinsic value") {
    // slope 0 makes the effective underlying the intercept minus fuel cost
    const double gf = 40.0;
    const double b = c.cost + c.heat_rate * gf + 10.0;
    const double v = linear_reduction_price(0.0, b, LinearMap::identity, gf,
                                            1e-12, c);
    CHECK(v == doctest::Approx(10.0 * std::exp(-0.03 * 0.5)).epsilon(1e-9));
  }

  SUBCASE("quadrature reference value") {
    const double v = linear_reduction_price(1.4, 5.0, LinearMap::identity, 40.0,
                                            0.3, c);
    CHECK(v == doctest::Approx(8.946746026496768).epsilon(1e-12));
    // independent lognormal-quadrature oracle for the same contract
    CHECK(std::abs(v - 8.946746008213523) < 1e-6 * v);
  }

  SUBCASE("a lambda-zero jump model matches the jump-free branch") {
    MertonParams j;
    j.s0 = 1.0;
    j.lambda = 0.0;
    const double plain = linear_reduction_price(1.4, 5.0, LinearMap::identity,
                                                40.0, 0.3, c);
    const double with_jumps = linear_reduction_price(
        1.4, 5.0, LinearMap::identity, 40.0, 0.3, c, j);
    CHECK(with_jumps == doctest::Approx(plain).epsilon(1e-12));
  }

  SUBCASE("log map transforms the gas forward") {
    const double shat = 2.0 * std::log(40.0) + 5.0 - 0.8 * 40.0 + 30.0;
    Contract cl = c;
    cl.cost = 3.0;
    const double expected =
        bs_call_prepaid(shat * std::exp(-0.03 * 0.5),
                        3.0 * std::exp(-0.03 * 0.5), 0.3, 0.5);
    CHECK(linear_reduction_price(2.0, 5.0 + 30.0, LinearMap::log, 40.0, 0.3,
                                 cl) == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("nonpositive effective underlying is reported") {
    CHECK_THROWS_AS(linear_reduction_price(0.0, 0.8 * 40.0 - 1.0,
                                           LinearMap::identity, 40.0, 0.3, c),
                    ValidationError);
  }
}
