#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "sparkspread/mc_oracle.hpp"
#include "sparkspread/models.hpp"
#include "sparkspread/pricing_closed.hpp"
#include "sparkspread/pricing_series.hpp"
#include "sparkspread/simulate.hpp"

namespace sparkspread {

using json = nlohmann::json;

inline constexpr const char* kSchemaName = "sparkspread-params-v1";

// Method sections. Analytic spread methods (kirk, margrabe, series) read
// their legs off the merton-family model: x1 = electricity forward,
// x2 = heat_rate * gas forward, strike = contract cost.
struct MethodKirk {};
struct MethodMargrabe {};

// Explicit single-asset Black-Scholes on pre-paid forwards.
struct MethodBs {
  double forward = 0.0;
  double strike = 0.0;
  double sigma = 0.0;
};

struct MethodMertonSeries {
  std::string leg = "electricity";
  std::optional<double> strike;  // defaults to contract cost
  double tail_tol = 1e-10;
};

struct MethodLinearReduction {
  double a = 0.0;
  double b = 0.0;
  LinearMap map = LinearMap::identity;
  std::optional<double> gas_forward;  // defaults to the model's gas forward
  std::optional<double> gas_sigma;    // defaults to the model's gas sigma
  bool use_jumps = false;
};

struct MethodSeries {
  InnerPricer inner = InnerPricer::quadrature;
  TruncationPolicy policy;
};

struct MethodMc {
  long n_paths = 100000;
};

using MethodConfig = std::variant<MethodKirk, MethodMargrabe, MethodBs,
                                  MethodMertonSeries, MethodLinearReduction,
                                  MethodSeries, MethodMc>;

struct SimulateSpec {
  TimeGrid grid;
  int n_paths = 100;
  std::string commodity = "both";  // electricity | gas | both
  bool binary = false;
};

struct RunConfig {
  ModelConfig model;
  Contract contract;
  MethodConfig method;
  std::uint64_t seed = 1;
  std::optional<SimulateSpec> simulate;
};

// Errors carry the offending field path, e.g. "contract.tau1".
RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);
json config_to_json(const RunConfig& cfg);

json convergence_to_json(const ConvergenceReport& rep);
json mc_result_to_json(const MCResult& r);
json bounds_to_json(const BoundsResult& b);
json containment_to_json(const ContainmentReport& rep);

const char* method_name(const MethodConfig& m);
const char* model_family(const ModelConfig& m);

struct PriceOutcome {
  json result;          // full result document
  std::string summary;  // one-line human text
  bool converged = true;
};

// Dispatches the configured method; validation failures throw
// ValidationError, non-convergence comes back with converged = false.
PriceOutcome run_price(const RunConfig& cfg);

}  // namespace sparkspread
