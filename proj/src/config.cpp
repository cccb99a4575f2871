#include "sparkspread/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sparkspread/common.hpp"

namespace sparkspread {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("config: " + path + ": " + what);
}

const json& member(const json& j, const std::string& path, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double get_num(const json& j, const std::string& path, const char* key) {
  const json& v = member(j, path, key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double get_num_or(const json& j, const std::string& path, const char* key,
                  double dflt) {
  const auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_number()) fail(path + "." + key, "expected a number");
  return it->get<double>();
}

long get_int_or(const json& j, const std::string& path, const char* key,
                long dflt) {
  const auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_number_integer()) fail(path + "." + key, "expected an integer");
  return it->get<long>();
}

std::string get_str_or(const json& j, const std::string& path, const char* key,
                       const std::string& dflt) {
  const auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_string()) fail(path + "." + key, "expected a string");
  return it->get<std::string>();
}

bool get_bool_or(const json& j, const std::string& path, const char* key,
                 bool dflt) {
  const auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_boolean()) fail(path + "." + key, "expected a boolean");
  return it->get<bool>();
}

void check_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

SeasonalFunction parse_seasonal(const json& j, const std::string& path) {
  check_object(j, path);
  SeasonalFunction fn;
  fn.c0 = get_num_or(j, path, "c0", 0.0);
  fn.c1 = get_num_or(j, path, "c1", 0.0);
  if (const auto it = j.find("harmonics"); it != j.end()) {
    if (!it->is_array()) fail(path + ".harmonics", "expected an array");
    int idx = 0;
    for (const json& hj : *it) {
      const std::string hpath = path + ".harmonics[" + std::to_string(idx++) + "]";
      check_object(hj, hpath);
      Harmonic h;
      h.amplitude = get_num(hj, hpath, "amplitude");
      h.period = get_num(hj, hpath, "period");
      h.phase = get_num_or(hj, hpath, "phase", 0.0);
      fn.harmonics.push_back(h);
    }
  }
  return fn;
}

TwoFactorJumpParams parse_two_factor(const json& j, const std::string& path) {
  check_object(j, path);
  TwoFactorJumpParams p;
  p.alpha = get_num(j, path, "alpha");
  p.sigma = get_num(j, path, "sigma");
  p.beta = get_num(j, path, "beta");
  p.eta = get_num_or(j, path, "eta", 1.0);
  p.jump_intensity = get_num(j, path, "jump_intensity");
  p.jump_mean = get_num_or(j, path, "jump_mean", 0.0);
  p.jump_sd = get_num_or(j, path, "jump_sd", 0.0);
  p.x0 = get_num_or(j, path, "x0", 0.0);
  p.y0 = get_num_or(j, path, "y0", 0.0);
  p.seasonal = parse_seasonal(member(j, path, "seasonal"), path + ".seasonal");
  return p;
}

MertonParams parse_merton(const json& j, const std::string& path) {
  check_object(j, path);
  MertonParams p;
  p.s0 = get_num(j, path, "s0");
  p.r = get_num(j, path, "r");
  p.q = get_num_or(j, path, "q", 0.0);
  p.sigma = get_num(j, path, "sigma");
  p.lambda = get_num(j, path, "lambda");
  p.m = get_num_or(j, path, "m", 0.0);
  p.s = get_num_or(j, path, "s", 0.0);
  return p;
}

ModelConfig parse_model(const json& j) {
  const std::string path = "model";
  check_object(j, path);
  const std::string family = get_str_or(j, path, "family", "");
  const double rho = get_num(j, path, "rho");
  if (family == "merton") {
    MertonModel m;
    m.electricity = parse_merton(member(j, path, "electricity"), path + ".electricity");
    m.gas = parse_merton(member(j, path, "gas"), path + ".gas");
    m.rho = rho;
    return m;
  }
  if (family == "two_factor") {
    TwoFactorModel m;
    m.electricity =
        parse_two_factor(member(j, path, "electricity"), path + ".electricity");
    m.gas = parse_two_factor(member(j, path, "gas"), path + ".gas");
    m.rho = rho;
    return m;
  }
  fail(path + ".family", "unknown model family '" + family +
                             "' (expected 'merton' or 'two_factor')");
}

Contract parse_contract(const json& j) {
  const std::string path = "contract";
  check_object(j, path);
  Contract c;
  c.t = get_num_or(j, path, "t", 0.0);
  c.tau = get_num(j, path, "tau");
  c.tau1 = get_num(j, path, "tau1");
  c.tau2 = get_num(j, path, "tau2");
  c.heat_rate = get_num(j, path, "heat_rate");
  c.cost = get_num_or(j, path, "cost", 0.0);
  c.r_f = get_num_or(j, path, "r_f", 0.0);
  c.grid_step = get_num_or(j, path, "grid_step", 1.0 / 365.0);
  c.validate();
  return c;
}

MethodConfig parse_method(const json& j) {
  const std::string path = "method";
  check_object(j, path);
  const std::string name = get_str_or(j, path, "name", "");
  if (name == "kirk") return MethodKirk{};
  if (name == "margrabe") return MethodMargrabe{};
  if (name == "bs") {
    MethodBs m;
    m.forward = get_num(j, path, "forward");
    m.strike = get_num(j, path, "strike");
    m.sigma = get_num(j, path, "sigma");
    return m;
  }
  if (name == "merton_series") {
    MethodMertonSeries m;
    m.leg = get_str_or(j, path, "leg", "electricity");
    if (m.leg != "electricity" && m.leg != "gas") {
      fail(path + ".leg", "expected 'electricity' or 'gas'");
    }
    if (j.contains("strike")) m.strike = get_num(j, path, "strike");
    m.tail_tol = get_num_or(j, path, "tail_tol", 1e-10);
    return m;
  }
  if (name == "linear_reduction") {
    MethodLinearReduction m;
    m.a = get_num(j, path, "a");
    m.b = get_num(j, path, "b");
    const std::string map = get_str_or(j, path, "map", "identity");
    if (map == "identity") {
      m.map = LinearMap::identity;
    } else if (map == "log") {
      m.map = LinearMap::log;
    } else {
      fail(path + ".map", "expected 'identity' or 'log'");
    }
    if (j.contains("gas_forward")) m.gas_forward = get_num(j, path, "gas_forward");
    if (j.contains("gas_sigma")) m.gas_sigma = get_num(j, path, "gas_sigma");
    m.use_jumps = get_bool_or(j, path, "use_jumps", false);
    return m;
  }
  if (name == "series") {
    MethodSeries m;
    const std::string inner = get_str_or(j, path, "inner", "quadrature");
    if (inner == "kirk") {
      m.inner = InnerPricer::kirk;
    } else if (inner == "quadrature") {
      m.inner = InnerPricer::quadrature;
    } else {
      fail(path + ".inner", "expected 'kirk' or 'quadrature'");
    }
    m.policy.stop_tol = get_num_or(j, path, "stop_tol", 1e-6);
    m.policy.max_diagonal = int(get_int_or(j, path, "max_diagonal", 60));
    m.policy.weight_tail_tol = get_num_or(j, path, "weight_tail_tol", 1e-8);
    m.policy.quadrature_nodes = int(get_int_or(j, path, "nodes", 64));
    m.policy.validate();
    return m;
  }
  if (name == "mc") {
    MethodMc m;
    m.n_paths = get_int_or(j, path, "n_paths", 100000);
    if (m.n_paths < 100) fail(path + ".n_paths", "need at least 100 paths");
    return m;
  }
  fail(path + ".name",
       "unknown method '" + name +
           "' (expected kirk, margrabe, bs, merton_series, linear_reduction, "
           "series or mc)");
}

SimulateSpec parse_simulate(const json& j) {
  const std::string path = "simulate";
  check_object(j, path);
  SimulateSpec s;
  const json& gj = member(j, path, "grid");
  check_object(gj, path + ".grid");
  s.grid.start = get_num_or(gj, path + ".grid", "start", 0.0);
  s.grid.end = get_num(gj, path + ".grid", "end");
  s.grid.n_steps = int(get_int_or(gj, path + ".grid", "n_steps", 365));
  s.grid.validate();
  s.n_paths = int(get_int_or(j, path, "n_paths", 100));
  if (s.n_paths < 1) fail(path + ".n_paths", "need at least one path");
  s.commodity = get_str_or(j, path, "commodity", "both");
  if (s.commodity != "electricity" && s.commodity != "gas" &&
      s.commodity != "both") {
    fail(path + ".commodity", "expected 'electricity', 'gas' or 'both'");
  }
  s.binary = get_bool_or(j, path, "binary", false);
  return s;
}

json seasonal_to_json(const SeasonalFunction& fn) {
  json j;
  j["c0"] = fn.c0;
  j["c1"] = fn.c1;
  json harmonics = json::array();
  for (const Harmonic& h : fn.harmonics) {
    harmonics.push_back({{"amplitude", h.amplitude},
                         {"period", h.period},
                         {"phase", h.phase}});
  }
  j["harmonics"] = harmonics;
  return j;
}

json two_factor_to_json(const TwoFactorJumpParams& p) {
  return json{{"alpha", p.alpha},
              {"sigma", p.sigma},
              {"beta", p.beta},
              {"eta", p.eta},
              {"jump_intensity", p.jump_intensity},
              {"jump_mean", p.jump_mean},
              {"jump_sd", p.jump_sd},
              {"x0", p.x0},
              {"y0", p.y0},
              {"seasonal", seasonal_to_json(p.seasonal)}};
}

json merton_to_json(const MertonParams& p) {
  return json{{"s0", p.s0},     {"r", p.r}, {"q", p.q}, {"sigma", p.sigma},
              {"lambda", p.lambda}, {"m", p.m}, {"s", p.s}};
}

json method_to_json(const MethodConfig& m) {
  json j;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, MethodKirk>) {
          j["name"] = "kirk";
        } else if constexpr (std::is_same_v<T, MethodMargrabe>) {
          j["name"] = "margrabe";
        } else if constexpr (std::is_same_v<T, MethodBs>) {
          j["name"] = "bs";
          j["forward"] = v.forward;
          j["strike"] = v.strike;
          j["sigma"] = v.sigma;
        } else if constexpr (std::is_same_v<T, MethodMertonSeries>) {
          j["name"] = "merton_series";
          j["leg"] = v.leg;
          if (v.strike.has_value()) j["strike"] = *v.strike;
          j["tail_tol"] = v.tail_tol;
        } else if constexpr (std::is_same_v<T, MethodLinearReduction>) {
          j["name"] = "linear_reduction";
          j["a"] = v.a;
          j["b"] = v.b;
          j["map"] = v.map == LinearMap::identity ? "identity" : "log";
          if (v.gas_forward.has_value()) j["gas_forward"] = *v.gas_forward;
          if (v.gas_sigma.has_value()) j["gas_sigma"] = *v.gas_sigma;
          j["use_jumps"] = v.use_jumps;
        } else if constexpr (std::is_same_v<T, MethodSeries>) {
          j["name"] = "series";
          j["inner"] = v.inner == InnerPricer::kirk ? "kirk" : "quadrature";
          j["stop_tol"] = v.policy.stop_tol;
          j["max_diagonal"] = v.policy.max_diagonal;
          j["weight_tail_tol"] = v.policy.weight_tail_tol;
          j["nodes"] = v.policy.quadrature_nodes;
        } else if constexpr (std::is_same_v<T, MethodMc>) {
          j["name"] = "mc";
          j["n_paths"] = v.n_paths;
        }
      },
      m);
  return j;
}

}  // namespace

RunConfig parse_config(const json& j) {
  check_object(j, "(root)");
  const std::string schema = get_str_or(j, "(root)", "schema", "");
  if (schema != kSchemaName) {
    fail("schema", "expected \"" + std::string(kSchemaName) + "\"");
  }
  RunConfig cfg;
  cfg.model = parse_model(member(j, "(root)", "model"));
  cfg.contract = parse_contract(member(j, "(root)", "contract"));
  cfg.method = parse_method(member(j, "(root)", "method"));
  const long seed = get_int_or(j, "(root)", "seed", 1);
  if (seed < 0) fail("seed", "seed must be nonnegative");
  cfg.seed = std::uint64_t(seed);
  if (j.contains("simulate")) cfg.simulate = parse_simulate(j["simulate"]);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("config: '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["schema"] = kSchemaName;
  json model;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MertonModel>) {
          model["family"] = "merton";
          model["electricity"] = merton_to_json(m.electricity);
          model["gas"] = merton_to_json(m.gas);
        } else {
          model["family"] = "two_factor";
          model["electricity"] = two_factor_to_json(m.electricity);
          model["gas"] = two_factor_to_json(m.gas);
        }
        model["rho"] = m.rho;
      },
      cfg.model);
  j["model"] = model;
  j["contract"] = json{{"t", cfg.contract.t},
                       {"tau", cfg.contract.tau},
                       {"tau1", cfg.contract.tau1},
                       {"tau2", cfg.contract.tau2},
                       {"heat_rate", cfg.contract.heat_rate},
                       {"cost", cfg.contract.cost},
                       {"r_f", cfg.contract.r_f},
                       {"grid_step", cfg.contract.grid_step}};
  j["method"] = method_to_json(cfg.method);
  j["seed"] = cfg.seed;
  if (cfg.simulate.has_value()) {
    j["simulate"] = json{{"grid",
                          {{"start", cfg.simulate->grid.start},
                           {"end", cfg.simulate->grid.end},
                           {"n_steps", cfg.simulate->grid.n_steps}}},
                         {"n_paths", cfg.simulate->n_paths},
                         {"commodity", cfg.simulate->commodity},
                         {"binary", cfg.simulate->binary}};
  }
  return j;
}

json convergence_to_json(const ConvergenceReport& rep) {
  return json{{"terms_evaluated", rep.terms_evaluated},
              {"final_diagonal", rep.final_diagonal},
              {"error_sequence", rep.error_sequence},
              {"tail_mass_bound", rep.tail_mass_bound},
              {"tail_price_bound", rep.tail_price_bound},
              {"converged", rep.converged}};
}

json mc_result_to_json(const MCResult& r) {
  return json{{"estimate", r.estimate},
              {"std_error", r.std_error},
              {"ci95", {r.ci95_low, r.ci95_high}},
              {"n_paths", r.n_paths},
              {"seed", r.seed},
              {"model_tag", r.model_tag}};
}

json bounds_to_json(const BoundsResult& b) {
  return json{{"lower", b.lower},
              {"upper", b.upper},
              {"k_assumption_violated", b.k_assumption_violated}};
}

json containment_to_json(const ContainmentReport& rep) {
  json cases = json::array();
  for (const ContainmentCase& c : rep.cases) {
    cases.push_back(json{{"case_id", c.case_id},
                         {"model", c.model_tag},
                         {"lower", c.lower},
                         {"upper", c.upper},
                         {"estimate", c.estimate},
                         {"std_error", c.std_error},
                         {"pass", c.pass}});
  }
  return json{{"cases", cases},
              {"n_cases", int(rep.cases.size())},
              {"n_pass", rep.n_pass},
              {"all_pass", rep.all_pass}};
}

const char* method_name(const MethodConfig& m) {
  return std::visit(
      [](const auto& v) -> const char* {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, MethodKirk>) return "kirk";
        if constexpr (std::is_same_v<T, MethodMargrabe>) return "margrabe";
        if constexpr (std::is_same_v<T, MethodBs>) return "bs";
        if constexpr (std::is_same_v<T, MethodMertonSeries>)
          return "merton_series";
        if constexpr (std::is_same_v<T, MethodLinearReduction>)
          return "linear_reduction";
        if constexpr (std::is_same_v<T, MethodSeries>) return "series";
        if constexpr (std::is_same_v<T, MethodMc>) return "mc";
      },
      m);
}

const char* model_family(const ModelConfig& m) {
  return std::holds_alternative<MertonModel>(m) ? "merton" : "two_factor";
}

namespace {

const MertonModel& require_merton(const RunConfig& cfg, const char* method) {
  const MertonModel* mm = std::get_if<MertonModel>(&cfg.model);
  if (!mm) {
    throw ValidationError(std::string("method '") + method +
                          "' requires the merton model family");
  }
  mm->electricity.validate();
  mm->gas.validate();
  require(std::abs(mm->rho) <= 1.0, "model.rho must lie in [-1, 1]");
  return *mm;
}

void require_no_jumps(const MertonModel& m, const char* method) {
  if (m.electricity.lambda != 0.0 || m.gas.lambda != 0.0) {
    throw ValidationError(
        std::string("method '") + method +
        "' prices a pure diffusion; set lambda = 0 on both legs or use "
        "method 'series' with inner '" + method + "'");
  }
}

}  // namespace

PriceOutcome run_price(const RunConfig& cfg) {
  cfg.contract.validate();
  const Contract& c = cfg.contract;
  const double span = c.maturity_span();
  const double df = std::exp(-c.r_f * span);

  PriceOutcome out;
  json& res = out.result;
  res["schema"] = kSchemaName;
  res["kind"] = "price_result";
  res["model_family"] = model_family(cfg.model);
  res["method"] = method_name(cfg.method);
  res["seed"] = cfg.seed;

  double price = 0.0;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MethodKirk>) {
          const MertonModel& mm = require_merton(cfg, "kirk");
          require_no_jumps(mm, "kirk");
          SpreadInputs si;
          si.x1 = mm.electricity.forward(span);
          si.x2 = c.heat_rate * mm.gas.forward(span);
          si.k = c.cost;
          si.sigma1 = mm.electricity.sigma;
          si.sigma2 = mm.gas.sigma;
          si.rho = mm.rho;
          si.dt = span;
          si.r_f = c.r_f;
          price = kirk_spread(si);
          res["bounds"] = bounds_to_json(deng_bounds(
              mm.electricity.forward(span), mm.gas.forward(span), c));
        } else if constexpr (std::is_same_v<T, MethodMargrabe>) {
          const MertonModel& mm = require_merton(cfg, "margrabe");
          require_no_jumps(mm, "margrabe");
          require(c.cost == 0.0,
                  "method 'margrabe' prices a costless exchange; "
                  "contract.cost must be 0");
          price = margrabe(mm.electricity.forward(span),
                           c.heat_rate * mm.gas.forward(span),
                           mm.electricity.sigma, mm.gas.sigma, mm.rho, span);
          res["bounds"] = bounds_to_json(deng_bounds(
              mm.electricity.forward(span), mm.gas.forward(span), c));
        } else if constexpr (std::is_same_v<T, MethodBs>) {
          price = bs_call_prepaid(m.forward * df, m.strike * df, m.sigma, span);
        } else if constexpr (std::is_same_v<T, MethodMertonSeries>) {
          const MertonModel& mm = require_merton(cfg, "merton_series");
          const MertonParams& leg =
              m.leg == "gas" ? mm.gas : mm.electricity;
          const double strike = m.strike.value_or(c.cost);
          price = merton_series_price(leg, strike, span, m.tail_tol);
          res["bounds"] = bounds_to_json(deng_bounds(
              mm.electricity.forward(span), mm.gas.forward(span), c));
        } else if constexpr (std::is_same_v<T, MethodLinearReduction>) {
          const MertonModel& mm = require_merton(cfg, "linear_reduction");
          const double gf = m.gas_forward.value_or(mm.gas.forward(span));
          const double gs = m.gas_sigma.value_or(mm.gas.sigma);
          std::optional<MertonParams> jumps;
          if (m.use_jumps) jumps = mm.gas;
          price = linear_reduction_price(m.a, m.b, m.map, gf, gs, c, jumps);
          res["bounds"] = bounds_to_json(
              deng_bounds(mm.electricity.forward(span), gf, c));
        } else if constexpr (std::is_same_v<T, MethodSeries>) {
          const MertonModel& mm = require_merton(cfg, "series");
          MertonParams gas_leg = mm.gas;
          gas_leg.s0 *= c.heat_rate;  // lognormal scale invariance
          const SeriesPrice sp =
              jump_series_price(mm.electricity, gas_leg, mm.rho, c.cost, span,
                                c.r_f, m.inner, m.policy);
          price = sp.price;
          res["convergence"] = convergence_to_json(sp.report);
          out.converged = sp.report.converged;
          res["bounds"] = bounds_to_json(deng_bounds(
              mm.electricity.forward(span), mm.gas.forward(span), c));
        } else if constexpr (std::is_same_v<T, MethodMc>) {
          ForwardEstimate fwd;
          const MCResult r =
              mc_spark_spread(cfg.model, c, m.n_paths, cfg.seed, &fwd);
          price = r.estimate;
          res["mc"] = mc_result_to_json(r);
          res["bounds"] = bounds_to_json(deng_bounds(fwd.f_e, fwd.f_g, c));
        }
      },
      cfg.method);

  res["price"] = price;
  char buf[160];
  std::snprintf(buf, sizeof buf, "price=%.10g method=%s model=%s%s", price,
                method_name(cfg.method), model_family(cfg.model),
                out.converged ? "" : " (NOT CONVERGED)");
  out.summary = buf;
  return out;
}

}  // namespace sparkspread
