#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "sparkspread/common.hpp"
#include "sparkspread/config.hpp"
#include "sparkspread/pricing_closed.hpp"

using namespace sparkspread;

namespace {

json base_config() {
  json j;
  j["schema"] = kSchemaName;
  j["model"] = {
      {"family", "merton"},
      {"rho", 0.3},
      {"electricity",
       {{"s0", 100.0}, {"r", 0.05}, {"sigma", 0.3}, {"lambda", 0.0}}},
      {"gas", {{"s0", 90.0}, {"r", 0.05}, {"sigma", 0.2}, {"lambda", 0.0}}}};
  j["contract"] = {{"t", 0.0},
                   {"tau", 1.0},
                   {"tau1", 1.0},
                   {"tau2", 1.0 + 10.0 / 365.0},
                   {"heat_rate", 1.0},
                   {"cost", 5.0},
                   {"r_f", 0.05}};
  j["method"] = {{"name", "kirk"}};
  j["seed"] = 7;
  return j;
}

bool message_contains(const std::function<void()>& fn, const std::string& what) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return std::string(e.what()).find(what) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_config(base_config());
  CHECK(std::holds_alternative<MertonModel>(cfg.model));
  const MertonModel& m = std::get<MertonModel>(cfg.model);
  CHECK(m.electricity.s0 == 100.0);
  CHECK(m.gas.sigma == 0.2);
  CHECK(m.rho == 0.3);
  CHECK(cfg.contract.cost == 5.0);
  CHECK(cfg.seed == 7);
  CHECK(std::holds_alternative<MethodKirk>(cfg.method));
  CHECK_FALSE(cfg.simulate.has_value());
}

TEST_CASE("parse-serialize-parse is the identity") {
  json j = base_config();
  j["simulate"] = {{"grid", {{"start", 0.0}, {"end", 1.0}, {"n_steps", 12}}},
                   {"n_paths", 50},
                   {"commodity", "gas"},
                   {"binary", true}};
  const RunConfig cfg = parse_config(j);
  const json out = config_to_json(cfg);
  const RunConfig cfg2 = parse_config(out);
  CHECK(config_to_json(cfg2) == out);
  REQUIRE(cfg2.simulate.has_value());
  CHECK(cfg2.simulate->commodity == "gas");
  CHECK(cfg2.simulate->binary);
  CHECK(cfg2.simulate->grid.n_steps == 12);
}

TEST_CASE("schema violations name the offending field") {
  CHECK(message_contains(
      [] {
        json j = base_config();
        j.erase("schema");
        parse_config(j);
      },
      "schema"));

  CHECK(message_contains(
      [] {
        json j = base_config();
        j["contract"]["tau1"] = 2.0;  // delivery starts after it ends
        parse_config(j);
      },
      "tau1"));

  CHECK(message_contains(
      [] {
        json j = base_config();
        j["model"]["family"] = "heston";
        parse_config(j);
      },
      "model.family"));

  CHECK(message_contains(
      [] {
        json j = base_config();
        j["method"]["name"] = "flubber";
        parse_config(j);
      },
      "method.name"));

  CHECK(message_contains(
      [] {
        json j = base_config();
        j["model"]["electricity"].erase("s0");
        parse_config(j);
      },
      "model.electricity.s0"));

  CHECK(message_contains(
      [] {
        json j = base_config();
        j["seed"] = -4;
        parse_config(j);
      },
      "seed"));

  CHECK(message_contains(
      [] {
        json j = base_config();
        j["contract"]["tau"] = "one";
        parse_config(j);
      },
      "contract.tau"));
}

TEST_CASE("price dispatch") {
  SUBCASE("kirk method prices the forward spread") {
    const RunConfig cfg = parse_config(base_config());
    const PriceOutcome out = run_price(cfg);
    SpreadInputs si;
    si.x1 = 100.0 * std::exp(0.05);
    si.x2 = 90.0 * std::exp(0.05);
    si.k = 5.0;
    si.sigma1 = 0.3;
    si.sigma2 = 0.2;
    si.rho = 0.3;
    si.dt = 1.0;
    si.r_f = 0.05;
    CHECK(out.result["price"].get<double>() ==
          doctest::Approx(kirk_spread(si)).epsilon(1e-14));
    CHECK(out.result["method"] == "kirk");
    CHECK(out.result["model_family"] == "merton");
    CHECK(out.result["kind"] == "price_result");
    CHECK(out.result.contains("bounds"));
    CHECK(out.converged);
    CHECK(out.summary.find("price=") != std::string::npos);
  }

  SUBCASE("jump-free series with a kirk inner equals the kirk method") {
    const RunConfig kirk_cfg = parse_config(base_config());
    json j = base_config();
    j["method"] = {{"name", "series"}, {"inner", "kirk"}};
    const RunConfig series_cfg = parse_config(j);
    const double kirk_price = run_price(kirk_cfg).result["price"].get<double>();
    const PriceOutcome series_out = run_price(series_cfg);
    CHECK(series_out.result["price"].get<double>() ==
          doctest::Approx(kirk_price).epsilon(1e-12));
    CHECK(series_out.result.contains("convergence"));
    CHECK(series_out.result["convergence"]["converged"].get<bool>());
  }

  SUBCASE("kirk refuses jumps and points at the series method") {
    json j = base_config();
    j["model"]["electricity"]["lambda"] = 0.5;
    const RunConfig cfg = parse_config(j);
    CHECK(message_contains([&] { run_price(cfg); }, "series"));
  }

  SUBCASE("margrabe needs a costless contract") {
    json j = base_config();
    j["method"] = {{"name", "margrabe"}};
    CHECK(message_contains([&] { run_price(parse_config(j)); }, "cost"));
    j["contract"]["cost"] = 0.0;
    const PriceOutcome out = run_price(parse_config(j));
    CHECK(out.result["price"].get<double>() ==
          doctest::Approx(margrabe(100.0 * std::exp(0.05), 90.0 * std::exp(0.05),
                                   0.3, 0.2, 0.3, 1.0))
              .epsilon(1e-14));
  }

  SUBCASE("explicit single-asset call") {
    json j = base_config();
    j["method"] = {{"name", "bs"},
                   {"forward", 110.0},
                   {"strike", 100.0},
                   {"sigma", 0.25}};
    const PriceOutcome out = run_price(parse_config(j));
    const double df = std::exp(-0.05);
    CHECK(out.result["price"].get<double>() ==
          doctest::Approx(bs_call_prepaid(110.0 * df, 100.0 * df, 0.25, 1.0))
              .epsilon(1e-14));
  }

  SUBCASE("monte carlo carries its diagnostics") {
    json j = base_config();
    j["method"] = {{"name", "mc"}, {"n_paths", 2000}};
    j["model"]["electricity"]["lambda"] = 0.4;
    j["model"]["electricity"]["m"] = -0.1;
    j["model"]["electricity"]["s"] = 0.15;
    const PriceOutcome out = run_price(parse_config(j));
    CHECK(out.result["mc"]["n_paths"].get<long>() == 2000);
    CHECK(out.result["mc"]["seed"].get<std::uint64_t>() == 7);
    CHECK(out.result["price"].get<double>() >= 0.0);
    CHECK(out.result["bounds"].contains("lower"));
    // reruns of the same config are identical
    const PriceOutcome again = run_price(parse_config(j));
    CHECK(again.result == out.result);
  }

  SUBCASE("methods that need the lognormal family say so") {
    json j = base_config();
    j["model"] = {{"family", "two_factor"},
                  {"rho", 0.2},
                  {"electricity",
                   {{"alpha", 3.0},
                    {"sigma", 2.0},
                    {"beta", 30.0},
                    {"jump_intensity", 0.0},
                    {"seasonal", {{"c0", 50.0}}}}},
                  {"gas",
                   {{"alpha", 2.0},
                    {"sigma", 0.3},
                    {"beta", 30.0},
                    {"jump_intensity", 0.0},
                    {"seasonal", {{"c0", 5.0}}}}}};
    const RunConfig cfg = parse_config(j);
    CHECK(message_contains([&] { run_price(cfg); }, "merton"));
  }
}

TEST_CASE("config files load with byte-level errors reported") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sparkspread_test_cfg";
  fs::create_directories(dir);
  const fs::path good = dir / "good.json";
  {
    std::ofstream os(good);
    os << base_config().dump(2) << "\n";
  }
  const RunConfig cfg = load_config(good.string());
  CHECK(std::holds_alternative<MethodKirk>(cfg.method));

  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ValidationError);

  const fs::path mangled = dir / "mangled.json";
  {
    std::ofstream os(mangled);
    os << "{not json";
  }
  CHECK_THROWS_AS(load_config(mangled.string()), ValidationError);
  fs::remove_all(dir);
}
