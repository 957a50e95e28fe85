#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "revlin/coefficients.hpp"
#include "revlin/innovations.hpp"
#include "revlin/mc.hpp"
#include "revlin/oracle.hpp"

namespace revlin {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// {"kind": "mh", "a", "q"} | {"kind": "gaussian", "r", "hermite": [c_1, ...]} |
/// {"kind": "group", "m", "step_pmf": [...], "fourier": [{"j", "re", "im"}]}.
/// Unknown keys and out-of-range values raise ConfigError.
ChainSpec chain_from_json(const Json& j);
Json to_json(const ChainSpec& chain);

/// {"kind": "power_law" | "power_diff" | "log_power", "alpha"} | {"kind": "frac_int", "d"} |
/// {"kind": "geometric", "ratio", "scale"?} | {"kind": "delta"}.
CoefficientFamily family_from_json(const Json& j);
Json to_json(const CoefficientFamily& family);

/// Command-line shorthand "kind:key=value,key=value" turned into the JSON form.
///   mh:a=1,q=1
///   gaussian:r=0.5,hermite=1/0.5          (c_1/c_2/...)
///   group:m=6,steps=1/5,f1=0.5,f5=0.5     (uniform over steps; fK real, iK imaginary)
///   frac_int:d=0.25, geometric:ratio=0.5, delta
Json chain_shorthand(const std::string& text);
Json family_shorthand(const std::string& text);

struct OutputSection {
  std::optional<std::string> dir;
  std::string report = "report.json";
  std::optional<std::string> samples_csv;
  std::optional<std::string> weights_csv;
  std::optional<std::string> coefficients_csv;
};

/// Parsed configuration document: sections chain, family, experiment, output.
/// Every section is optional at parse time; commands check what they need.
struct RunConfig {
  Json chain_json;   ///< null when absent
  Json family_json;  ///< null when absent
  std::optional<std::string> mode;
  long n = 1000;
  long replicates = 2000;
  std::optional<std::vector<double>> t_grid;
  double eps = 1e-3;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  long max_window = WindowOptions{}.max_window;
  bool keep_samples = false;
  std::vector<long> key1_n;
  long coefficient_count = 64;
  Tolerances tolerances{};
  OutputSection output{};
};

/// ConfigError on malformed JSON, unknown keys or wrong types.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const Json& document);
inline RunConfig parse_config(const char* text) { return parse_config(std::string(text)); }

/// Echo of the effective configuration. threads and the output section are left
/// out so reports do not depend on where or how they were produced.
Json to_json(const RunConfig& cfg);

std::optional<ChainSpec> config_chain(const RunConfig& cfg);
std::optional<CoefficientFamily> config_family(const RunConfig& cfg);

/// ConfigError if chain, family or mode is missing.
ExperimentConfig experiment_config(const RunConfig& cfg);

/// Scalars are rounded to 15 significant digits; non-finite values become null.
Json number(double x);

Json to_json(const ConditionReport& report);
Json to_json(const LimitTargets& targets);
Json to_json(const ExperimentReport& report);
Json to_json(const RegVarDiagnostic& diagnostic);

/// Oracle document: chain, optional family, targets, conditions, notes.
Json oracle_report(const ChainSpec& chain, const std::optional<CoefficientFamily>& family);

/// Condition document only (used by the check command).
Json condition_report(const ChainSpec& chain);

std::string dump(const Json& j);

}  // namespace revlin
