#include "sparkspread/mc_oracle.hpp"

#include <cmath>

#include "sparkspread/common.hpp"
#include "sparkspread/math.hpp"
#include "sparkspread/rng.hpp"
#include "sparkspread/simulate.hpp"
#include "sparkspread/threads.hpp"

namespace sparkspread {

namespace {

constexpr long kDrawChunk = 65536;

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
};

// Two-pass mean/SE with compensated sums; deterministic order.
MeanSE sample_stats(std::span<const double> xs) {
  const std::size_t n = xs.size();
  NeumaierAccumulator sum;
  for (double x : xs) sum.add(x);
  MeanSE out;
  out.mean = sum.total() / double(n);
  NeumaierAccumulator dev2;
  for (double x : xs) {
    const double d = x - out.mean;
    dev2.add(d * d);
  }
  const double var = n > 1 ? std::max(dev2.total(), 0.0) / double(n - 1) : 0.0;
  out.se = std::sqrt(var / double(n));
  return out;
}

MCResult make_result(const MeanSE& stats, long n_paths, std::uint64_t seed,
                     std::string tag) {
  MCResult r;
  r.estimate = stats.mean;
  r.std_error = stats.se;
  r.ci95_low = stats.mean - 1.96 * stats.se;
  r.ci95_high = stats.mean + 1.96 * stats.se;
  r.n_paths = n_paths;
  r.seed = seed;
  r.model_tag = std::move(tag);
  return r;
}

int window_steps(double span, double grid_step) {
  const int n = int(std::lround(span / grid_step));
  return std::max(n, 1);
}

struct SparkPathData {
  std::vector<double> f_e;
  std::vector<double> f_g;
  std::string tag;
};

// grid_step is a target spacing: the grid uses the nearest step count that
// lands exactly on the window end.
SparkPathData run_spark_paths(const ModelConfig& model, const Contract& c,
                              long n_paths, std::uint64_t seed) {
  c.validate();
  require(n_paths >= 100, "mc_spark_spread: need at least 100 paths");
  require(n_paths <= 40'000'000, "mc_spark_spread: path count too large");

  SparkPathData out;
  PathPair paths;
  if (std::holds_alternative<TwoFactorModel>(model)) {
    const auto& m = std::get<TwoFactorModel>(model);
    const TimeGrid grid(c.t, c.tau2, window_steps(c.tau2 - c.t, c.grid_step));
    require(std::size_t(n_paths) * grid.n_points() <= 60'000'000,
            "mc_spark_spread: path storage too large; reduce n_paths or the "
            "delivery window");
    paths = simulate_two_factor(m.electricity, m.gas, m.rho, grid, int(n_paths),
                                seed);
    out.tag = "two_factor";
  } else {
    const auto& m = std::get<MertonModel>(model);
    // lognormal increments are exact over any step, so jump straight to the
    // window and keep the fine grid only where the average needs it
    const TimeGrid grid(c.tau1, c.tau2,
                        window_steps(c.tau2 - c.tau1, c.grid_step));
    require(std::size_t(n_paths) * grid.n_points() <= 60'000'000,
            "mc_spark_spread: path storage too large; reduce n_paths or the "
            "delivery window");
    paths = simulate_merton_paths(m.electricity, m.gas, m.rho, c.t, grid,
                                  int(n_paths), seed);
    out.tag = "merton";
  }
  out.f_e = forward_from_paths(paths.electricity, c);
  out.f_g = forward_from_paths(paths.gas, c);
  return out;
}

}  // namespace

MCResult mc_spark_spread(const ModelConfig& model, const Contract& c,
                         long n_paths, std::uint64_t seed,
                         ForwardEstimate* forwards) {
  const SparkPathData data = run_spark_paths(model, c, n_paths, seed);
  const double df = std::exp(-c.r_f * c.maturity_span());
  std::vector<double> payoff(data.f_e.size());
  for (std::size_t p = 0; p < payoff.size(); ++p) {
    payoff[p] =
        df * std::max(data.f_e[p] - c.heat_rate * data.f_g[p] - c.cost, 0.0);
  }
  if (forwards) {
    forwards->f_e = sample_stats(data.f_e).mean;
    forwards->f_g = sample_stats(data.f_g).mean;
  }
  return make_result(sample_stats(payoff), n_paths, seed, data.tag);
}

MCResult mc_spread_terminal(const SpreadInputs& in, long n_draws,
                            std::uint64_t seed) {
  in.validate();
  require(n_draws >= 100, "mc_spread_terminal: need at least 100 draws");

  const double df = std::exp(-in.r_f * in.dt);
  const double k_eff = in.k * df;
  const double sqdt = std::sqrt(in.dt);
  const double a1 = in.sigma1 * sqdt;
  const double b1 = -0.5 * in.sigma1 * in.sigma1 * in.dt;
  const double a2 = in.sigma2 * sqdt;
  const double b2 = -0.5 * in.sigma2 * in.sigma2 * in.dt;
  const double rho_perp = std::sqrt(1.0 - in.rho * in.rho);

  const long n_chunks = (n_draws + kDrawChunk - 1) / kDrawChunk;
  std::vector<double> chunk_sum(n_chunks), chunk_sumsq(n_chunks);
  parallel_chunks(n_draws, kDrawChunk, [&](long chunk, long begin, long end) {
    NeumaierAccumulator s, s2;
    for (long d = begin; d < end; ++d) {
      RandomStream rs(seed, std::uint64_t(d));
      const double z1 = rs.normal();
      const double z2 = in.rho * z1 + rho_perp * rs.normal();
      const double x1 = in.x1 * std::exp(a1 * z1 + b1);
      const double x2 = in.x2 * std::exp(a2 * z2 + b2);
      const double pay = df * std::max(x1 - x2 - k_eff, 0.0);
      s.add(pay);
      s2.add(pay * pay);
    }
    chunk_sum[chunk] = s.total();
    chunk_sumsq[chunk] = s2.total();
  });

  const double sum = neumaier_sum(chunk_sum);
  const double sumsq = neumaier_sum(chunk_sumsq);
  MeanSE stats;
  stats.mean = sum / double(n_draws);
  const double var = std::max(sumsq - double(n_draws) * stats.mean * stats.mean,
                              0.0) /
                     double(n_draws - 1);
  stats.se = std::sqrt(var / double(n_draws));
  return make_result(stats, n_draws, seed, "terminal_lognormal");
}

namespace {

double draw_in(RandomStream& rs, double lo, double hi) {
  return lo + (hi - lo) * rs.uniform();
}

TwoFactorModel draw_two_factor_case(RandomStream& rs) {
  TwoFactorModel m;
  m.electricity.seasonal.c0 = draw_in(rs, 60.0, 120.0);
  m.electricity.alpha = draw_in(rs, 3.0, 8.0);
  m.electricity.sigma = draw_in(rs, 2.0, 8.0);
  m.electricity.beta = draw_in(rs, 30.0, 80.0);
  m.electricity.eta = draw_in(rs, 0.5, 1.5);
  m.electricity.jump_intensity = draw_in(rs, 2.0, 8.0);
  m.electricity.jump_mean = draw_in(rs, 2.0, 8.0);
  m.electricity.jump_sd = draw_in(rs, 0.5, 2.0);

  m.gas.seasonal.c0 = draw_in(rs, 3.0, 8.0);
  m.gas.alpha = draw_in(rs, 2.0, 6.0);
  m.gas.sigma = draw_in(rs, 0.2, 0.6);
  m.gas.beta = draw_in(rs, 30.0, 80.0);
  m.gas.eta = draw_in(rs, 0.2, 0.5);
  m.gas.jump_intensity = draw_in(rs, 1.0, 5.0);
  m.gas.jump_mean = draw_in(rs, 0.0, 0.3);
  m.gas.jump_sd = draw_in(rs, 0.1, 0.3);

  m.rho = draw_in(rs, -0.2, 0.8);
  return m;
}

MertonModel draw_merton_case(RandomStream& rs) {
  MertonModel m;
  m.electricity.s0 = draw_in(rs, 40.0, 120.0);
  m.electricity.r = draw_in(rs, 0.0, 0.1);
  m.electricity.q = draw_in(rs, 0.0, 0.04);
  m.electricity.sigma = draw_in(rs, 0.1, 0.5);
  m.electricity.lambda = draw_in(rs, 0.0, 2.0);
  m.electricity.m = draw_in(rs, -0.1, 0.3);
  m.electricity.s = draw_in(rs, 0.05, 0.3);

  m.gas.s0 = draw_in(rs, 3.0, 10.0);
  m.gas.r = draw_in(rs, 0.0, 0.1);
  m.gas.q = draw_in(rs, 0.0, 0.04);
  m.gas.sigma = draw_in(rs, 0.1, 0.4);
  m.gas.lambda = draw_in(rs, 0.0, 1.5);
  m.gas.m = draw_in(rs, -0.1, 0.2);
  m.gas.s = draw_in(rs, 0.05, 0.25);

  m.rho = draw_in(rs, -0.2, 0.8);
  return m;
}

}  // namespace

ContainmentReport bound_containment_sweep(int n_cases, std::uint64_t seed) {
  require(n_cases >= 1, "bound_containment_sweep: need at least one case");

  ContainmentReport report;
  report.cases.reserve(n_cases);
  for (int case_id = 0; case_id < n_cases; ++case_id) {
    RandomStream rs(derive_seed(seed, 1000 + std::uint64_t(case_id)), 0);

    Contract c;
    c.t = 0.0;
    c.tau = draw_in(rs, 30.0 / 365.0, 120.0 / 365.0);
    c.tau1 = c.tau;
    c.tau2 = c.tau1 + std::floor(draw_in(rs, 5.0, 30.999)) / 365.0;
    c.grid_step = 1.0 / 365.0;
    c.heat_rate = draw_in(rs, 0.5, 1.5);
    c.cost = 0.0;
    c.r_f = draw_in(rs, 0.0, 0.08);

    const bool merton_family = case_id % 2 == 1;
    ModelConfig model;
    long n_paths = 0;
    if (merton_family) {
      model = draw_merton_case(rs);
      n_paths = 20000;
    } else {
      model = draw_two_factor_case(rs);
      n_paths = 8192;
    }

    const std::uint64_t case_seed = derive_seed(seed, std::uint64_t(case_id));
    const SparkPathData data = run_spark_paths(model, c, n_paths, case_seed);
    const double df = std::exp(-c.r_f * c.maturity_span());
    std::vector<double> payoff(data.f_e.size());
    for (std::size_t p = 0; p < payoff.size(); ++p) {
      payoff[p] =
          df * std::max(data.f_e[p] - c.heat_rate * data.f_g[p] - c.cost, 0.0);
    }
    const MeanSE stats = sample_stats(payoff);
    const BoundsResult bounds = deng_bounds(sample_stats(data.f_e).mean,
                                            sample_stats(data.f_g).mean, c);

    ContainmentCase cc;
    cc.case_id = case_id;
    cc.model_tag = data.tag;
    cc.lower = bounds.lower;
    cc.upper = bounds.upper;
    cc.estimate = stats.mean;
    cc.std_error = stats.se;
    cc.pass = bounds.lower - 3.0 * stats.se <= stats.mean &&
              stats.mean <= bounds.upper + 3.0 * stats.se;
    report.n_pass += cc.pass ? 1 : 0;
    report.cases.push_back(std::move(cc));
  }
  report.all_pass = report.n_pass == int(report.cases.size());
  return report;
}

}  // namespace sparkspread
