#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparkspread/common.hpp"
#include "sparkspread/config.hpp"
#include "sparkspread/math.hpp"
#include "sparkspread/mc_oracle.hpp"
#include "sparkspread/pricing_closed.hpp"
#include "sparkspread/pricing_series.hpp"
#include "sparkspread/rng.hpp"
#include "sparkspread/simulate.hpp"

namespace fs = std::filesystem;
using namespace sparkspread;

namespace {

void write_text(const fs::path& p, const std::string& text) {
  if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << text;
}

int cmd_price(const std::string& config_path,
              const std::optional<std::uint64_t>& seed_override,
              const std::string& out_dir, bool report) {
  RunConfig cfg = load_config(config_path);
  if (seed_override) cfg.seed = *seed_override;
  const PriceOutcome outcome = run_price(cfg);
  const std::string stem = fs::path(config_path).stem().string();
  const fs::path out_file = fs::path(out_dir) / (stem + "_result.json");
  write_text(out_file, outcome.result.dump(2) + "\n");
  std::cout << outcome.summary << "\n";
  if (report && outcome.result.contains("convergence")) {
    std::cout << outcome.result["convergence"].dump(2) << "\n";
  }
  return outcome.converged ? 0 : 3;
}

int cmd_simulate(const std::string& config_path,
                 const std::optional<std::uint64_t>& seed_override,
                 const std::string& out_dir) {
  RunConfig cfg = load_config(config_path);
  if (seed_override) cfg.seed = *seed_override;
  if (!cfg.simulate.has_value()) {
    throw ValidationError(
        "config: simulate: section required by the simulate command");
  }
  const SimulateSpec& spec = *cfg.simulate;

  PathPair pair;
  if (const auto* mm = std::get_if<MertonModel>(&cfg.model)) {
    pair = simulate_merton_paths(mm->electricity, mm->gas, mm->rho,
                                 spec.grid.start, spec.grid, spec.n_paths,
                                 cfg.seed);
  } else {
    const auto& tf = std::get<TwoFactorModel>(cfg.model);
    pair = simulate_two_factor(tf.electricity, tf.gas, tf.rho, spec.grid,
                               spec.n_paths, cfg.seed);
  }

  const std::string stem = fs::path(config_path).stem().string();
  auto dump = [&](const PathSet& ps, const std::string& name) {
    const fs::path csv = fs::path(out_dir) / (stem + "_" + name + ".csv");
    if (!csv.parent_path().empty()) fs::create_directories(csv.parent_path());
    std::ofstream os(csv, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + csv.string() + "'");
    ps.write_csv(os);
    std::cout << "wrote " << csv.string() << "\n";
    if (spec.binary) {
      const fs::path bin = fs::path(out_dir) / (stem + "_" + name + ".bin");
      std::ofstream ob(bin, std::ios::binary);
      if (!ob) throw std::runtime_error("cannot write '" + bin.string() + "'");
      ps.write_binary(ob);
      std::cout << "wrote " << bin.string() << "\n";
    }
  };
  if (spec.commodity != "gas") dump(pair.electricity, "electricity");
  if (spec.commodity != "electricity") dump(pair.gas, "gas");
  return 0;
}

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

void check_bounds_suite(std::vector<Check>& checks, int n_cases,
                        std::uint64_t seed) {
  {
    // all noise off: the MC estimate must sit exactly on the lower bound
    TwoFactorModel m;
    m.electricity.seasonal.c0 = 50.0;
    m.gas.seasonal.c0 = 5.0;
    Contract c;
    c.t = 0.0;
    c.tau = c.tau1 = 60.0 / 365.0;
    c.tau2 = c.tau1 + 10.0 / 365.0;
    c.heat_rate = 1.0;
    c.cost = 0.0;
    c.r_f = 0.04;
    ForwardEstimate fwd;
    const MCResult r = mc_spark_spread(m, c, 500, seed, &fwd);
    const BoundsResult b = deng_bounds(fwd.f_e, fwd.f_g, c);
    Check ck{"bounds_deterministic", false, ""};
    ck.pass = r.std_error == 0.0 && b.lower <= r.estimate &&
              r.estimate <= b.upper &&
              std::abs(r.estimate - b.lower) <= 1e-12 * std::max(1.0, b.lower);
    char buf[128];
    std::snprintf(buf, sizeof buf, "estimate=%.6g lower=%.6g upper=%.6g",
                  r.estimate, b.lower, b.upper);
    ck.detail = buf;
    checks.push_back(ck);
  }
  {
    const ContainmentReport rep = bound_containment_sweep(n_cases, seed);
    Check ck{"bounds_sweep", rep.all_pass, ""};
    ck.detail = std::to_string(rep.n_pass) + "/" +
                std::to_string(rep.cases.size()) + " cases contained";
    checks.push_back(ck);
  }
  {
    // positive operating cost: the upper bound still holds and the result
    // is flagged as outside the lower bound's assumptions
    MertonModel m;
    m.electricity.s0 = 80.0;
    m.electricity.r = 0.03;
    m.electricity.sigma = 0.3;
    m.gas.s0 = 6.0;
    m.gas.r = 0.03;
    m.gas.sigma = 0.25;
    m.rho = 0.4;
    Contract c;
    c.t = 0.0;
    c.tau = c.tau1 = 90.0 / 365.0;
    c.tau2 = c.tau1 + 10.0 / 365.0;
    c.heat_rate = 8.0;
    c.cost = 10.0;
    c.r_f = 0.03;
    ForwardEstimate fwd;
    const MCResult r = mc_spark_spread(m, c, 20000, derive_seed(seed, 7), &fwd);
    const BoundsResult b = deng_bounds(fwd.f_e, fwd.f_g, c);
    Check ck{"bounds_k_positive", false, ""};
    ck.pass = b.k_assumption_violated &&
              r.estimate <= b.upper + 3.0 * r.std_error;
    char buf[128];
    std::snprintf(buf, sizeof buf, "estimate=%.6g upper=%.6g flagged=%d",
                  r.estimate, b.upper, int(b.k_assumption_violated));
    ck.detail = buf;
    checks.push_back(ck);
  }
}

// Cross-method agreement on a fixed spread case. Cases comparing the
// analytic pricers with the plain-payoff MC pin r_f = 0 so that both
// strike conventions coincide.
void check_oracle_suite(std::vector<Check>& checks, std::uint64_t seed) {
  SpreadInputs si;
  si.x1 = 100.0;
  si.x2 = 90.0;
  si.k = 5.0;
  si.sigma1 = 0.3;
  si.sigma2 = 0.2;
  si.rho = 0.4;
  si.dt = 1.0;
  si.r_f = 0.05;

  const double quad = spread_price_quadrature(si.x1, si.x2, si.k, si.sigma1,
                                              si.sigma2, si.rho, si.dt, si.r_f,
                                              64);
  {
    const double kirk = kirk_spread(si);
    const double rel = std::abs(kirk - quad) / quad;
    Check ck{"oracle_kirk_vs_quadrature", rel < 0.005, ""};
    char buf[128];
    std::snprintf(buf, sizeof buf, "kirk=%.8g quadrature=%.8g rel=%.3g", kirk,
                  quad, rel);
    ck.detail = buf;
    checks.push_back(ck);
  }
  {
    const MCResult mc = mc_spread_terminal(si, 1'000'000, derive_seed(seed, 11));
    const double diff = std::abs(quad - mc.estimate);
    Check ck{"oracle_quadrature_vs_mc", diff <= 3.0 * mc.std_error, ""};
    char buf[128];
    std::snprintf(buf, sizeof buf, "quadrature=%.8g mc=%.8g (se=%.3g)", quad,
                  mc.estimate, mc.std_error);
    ck.detail = buf;
    checks.push_back(ck);
  }
  {
    MertonParams pe;
    pe.s0 = 100.0;
    pe.sigma = 0.3;
    pe.lambda = 0.8;
    pe.m = 0.1;
    pe.s = 0.15;
    MertonParams pg;
    pg.s0 = 90.0;
    pg.sigma = 0.2;
    pg.lambda = 0.4;
    pg.m = -0.1;
    pg.s = 0.2;
    const double rho = 0.3, k = 5.0, horizon = 1.0;
    const SeriesPrice sp =
        jump_series_price(pe, pg, rho, k, horizon, 0.0, InnerPricer::quadrature,
                          adaptive_truncation(1e-6, 60, 1e-8));
    const TerminalSamples ts = simulate_merton(pe, pg, rho, horizon, 200'000,
                                               derive_seed(seed, 12));
    std::vector<double> pay(ts.electricity.size());
    for (std::size_t p = 0; p < pay.size(); ++p) {
      pay[p] = std::max(ts.electricity[p] - ts.gas[p] - k, 0.0);
    }
    NeumaierAccumulator sum;
    for (double x : pay) sum.add(x);
    const double mean = sum.total() / double(pay.size());
    NeumaierAccumulator dev2;
    for (double x : pay) dev2.add((x - mean) * (x - mean));
    const double se =
        std::sqrt(dev2.total() / double(pay.size() - 1) / double(pay.size()));
    Check ck{"oracle_series_vs_mc",
             sp.report.converged && std::abs(sp.price - mean) <= 3.0 * se, ""};
    char buf[128];
    std::snprintf(buf, sizeof buf, "series=%.8g mc=%.8g (se=%.3g)", sp.price,
                  mean, se);
    ck.detail = buf;
    checks.push_back(ck);
  }
  {
    MertonParams p;
    p.s0 = 100.0;
    p.r = 0.05;
    p.sigma = 0.2;
    p.lambda = 0.5;
    p.m = -0.1;
    p.s = 0.15;
    const double strike = 100.0, horizon = 1.0;
    const double series = merton_series_price(p, strike, horizon, 1e-12);
    MertonParams gas_dummy;
    gas_dummy.s0 = 1.0;
    const TerminalSamples ts = simulate_merton(p, gas_dummy, 0.0, horizon,
                                               200'000, derive_seed(seed, 13));
    const double df = std::exp(-p.r * horizon);
    std::vector<double> pay(ts.electricity.size());
    for (std::size_t i = 0; i < pay.size(); ++i) {
      pay[i] = df * std::max(ts.electricity[i] - strike, 0.0);
    }
    NeumaierAccumulator sum;
    for (double x : pay) sum.add(x);
    const double mean = sum.total() / double(pay.size());
    NeumaierAccumulator dev2;
    for (double x : pay) dev2.add((x - mean) * (x - mean));
    const double se =
        std::sqrt(dev2.total() / double(pay.size() - 1) / double(pay.size()));
    Check ck{"oracle_merton_series_vs_mc", std::abs(series - mean) <= 3.0 * se,
             ""};
    char buf[128];
    std::snprintf(buf, sizeof buf, "series=%.8g mc=%.8g (se=%.3g)", series,
                  mean, se);
    ck.detail = buf;
    checks.push_back(ck);
  }
}

void check_convergence_suite(std::vector<Check>& checks) {
  MertonParams pe;
  pe.s0 = 100.0;
  pe.sigma = 0.3;
  pe.lambda = 1.0;
  pe.m = 0.1;
  pe.s = 0.15;
  MertonParams pg;
  pg.s0 = 90.0;
  pg.sigma = 0.2;
  pg.lambda = 1.0;
  pg.m = -0.1;
  pg.s = 0.2;
  const double rho = 0.3, k = 5.0, horizon = 1.0, r_f = 0.0;

  const SeriesPrice sp =
      jump_series_price(pe, pg, rho, k, horizon, r_f, InnerPricer::quadrature,
                        adaptive_truncation(1e-6, 20, 1e-10));
  {
    Check ck{"convergence_lambda1", false, ""};
    ck.pass = sp.report.converged && sp.report.final_diagonal <= 20 &&
              sp.report.tail_price_bound < 1e-8;
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "converged=%d diagonal=%d tail_price_bound=%.3g",
                  int(sp.report.converged), sp.report.final_diagonal,
                  sp.report.tail_price_bound);
    ck.detail = buf;
    checks.push_back(ck);
  }
  {
    NeumaierAccumulator brute;
    for (int d = 0; d <= 60; ++d) {
      for (int i = d; i >= 0; --i) {
        const SeriesTerm t = term_transform(pe, pg, i, d - i, horizon, rho);
        brute.add(t.weight *
                  spread_price_quadrature(t.x1_tilde, t.x2_tilde, k,
                                          t.sigma1_tilde, t.sigma2_tilde,
                                          t.rho_tilde, horizon, r_f, 64));
      }
    }
    const double diff = std::abs(sp.price - brute.total());
    Check ck{"convergence_brute_force", diff <= 1e-9, ""};
    char buf[128];
    std::snprintf(buf, sizeof buf, "adaptive=%.12g brute=%.12g diff=%.3g",
                  sp.price, brute.total(), diff);
    ck.detail = buf;
    checks.push_back(ck);
  }
  {
    MertonParams qe = pe, qg = pg;
    qe.lambda = 0.0;
    qg.lambda = 0.0;
    const SeriesPrice single =
        jump_series_price(qe, qg, rho, k, horizon, r_f, InnerPricer::quadrature,
                          adaptive_truncation(1e-6, 20, 1e-10));
    Check ck{"convergence_zero_lambda", false, ""};
    ck.pass = single.report.converged && single.report.final_diagonal == 0 &&
              single.report.terms_evaluated == 1;
    char buf[128];
    std::snprintf(buf, sizeof buf, "diagonal=%d terms=%d",
                  single.report.final_diagonal, single.report.terms_evaluated);
    ck.detail = buf;
    checks.push_back(ck);
  }
}

int cmd_validate(const std::string& suite, int n_cases, std::uint64_t seed,
                 const std::string& out_dir) {
  if (suite != "bounds" && suite != "oracle" && suite != "convergence" &&
      suite != "all") {
    throw ValidationError("validate: unknown suite '" + suite +
                          "' (expected bounds, oracle, convergence or all)");
  }
  require(n_cases >= 1, "validate: --cases must be at least 1");

  std::vector<Check> checks;
  if (suite == "bounds" || suite == "all") {
    check_bounds_suite(checks, n_cases, seed);
  }
  if (suite == "oracle" || suite == "all") {
    check_oracle_suite(checks, seed);
  }
  if (suite == "convergence" || suite == "all") {
    check_convergence_suite(checks);
  }

  int n_pass = 0;
  json jchecks = json::array();
  std::string csv = "name,pass,detail\n";
  for (const Check& c : checks) {
    n_pass += c.pass ? 1 : 0;
    jchecks.push_back(
        json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    std::string detail = c.detail;
    for (char& ch : detail) {
      if (ch == ',') ch = ';';
    }
    csv += c.name + "," + (c.pass ? "true" : "false") + "," + detail + "\n";
    std::cout << (c.pass ? "PASS" : "FAIL") << " " << c.name << " (" << c.detail
              << ")\n";
  }
  const bool all_pass = n_pass == int(checks.size());
  json rep{{"schema", kSchemaName}, {"kind", "validation_report"},
           {"suite", suite},        {"seed", seed},
           {"checks", jchecks},     {"n_pass", n_pass},
           {"n_checks", int(checks.size())},
           {"all_pass", all_pass}};
  write_text(fs::path(out_dir) / ("validate_" + suite + "_report.json"),
             rep.dump(2) + "\n");
  write_text(fs::path(out_dir) / ("validate_" + suite + "_report.csv"), csv);
  std::cout << (all_pass ? "ALL PASS" : "FAILURES") << " (" << n_pass << "/"
            << checks.size() << ")\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spark-spread option pricing toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string suite = "all";
  bool report = false;
  int n_cases = 200;
  std::uint64_t seed_value = 0;

  CLI::App* price = app.add_subcommand("price", "price a contract from a config");
  price->add_option("--config", config_path, "config JSON path")->required();
  CLI::Option* price_seed =
      price->add_option("--seed", seed_value, "override the config seed");
  price->add_option("--out", out_dir, "output directory");
  price->add_flag("--report", report, "print the convergence report");

  CLI::App* sim = app.add_subcommand("simulate", "export simulated paths");
  sim->add_option("--config", config_path, "config JSON path")->required();
  CLI::Option* sim_seed =
      sim->add_option("--seed", seed_value, "override the config seed");
  sim->add_option("--out", out_dir, "output directory");

  CLI::App* val =
      app.add_subcommand("validate", "run bounds/oracle/convergence checks");
  val->add_option("suite", suite, "bounds | oracle | convergence | all");
  val->add_option("--cases", n_cases, "sweep size for the bounds suite");
  CLI::Option* val_seed = val->add_option("--seed", seed_value, "sweep seed");
  val->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (price->parsed()) {
      std::optional<std::uint64_t> seed;
      if (price_seed->count() > 0) seed = seed_value;
      return cmd_price(config_path, seed, out_dir, report);
    }
    if (sim->parsed()) {
      std::optional<std::uint64_t> seed;
      if (sim_seed->count() > 0) seed = seed_value;
      return cmd_simulate(config_path, seed, out_dir);
    }
    const std::uint64_t seed = val_seed->count() > 0 ? seed_value : 20240814ull;
    return cmd_validate(suite, n_cases, seed, out_dir);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
