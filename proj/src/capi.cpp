#include "revlin/revlin.h"

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <cstdio>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include "revlin/coefficients.hpp"
#include "revlin/errors.hpp"
#include "revlin/json_io.hpp"
#include "revlin/linproc.hpp"
#include "revlin/mc.hpp"
#include "revlin/oracle.hpp"

struct revlin_config {
  revlin::Json document = revlin::Json::object();
  revlin::RunConfig parsed;
  std::string text;
};

struct revlin_result {
  std::string json;
  revlin_verdict verdict = REVLIN_VERDICT_NONE;
  std::map<std::string, double> scalars;
  std::map<std::string, std::string> csv;
  revlin::OutputSection output;
};

namespace {

thread_local std::string last_error;

template <class Fn>
revlin_status guard(Fn&& fn) noexcept {
  try {
    last_error.clear();
    fn();
    return REVLIN_OK;
  } catch (const revlin::ConfigError& e) {
    last_error = e.what();
    return REVLIN_ERROR_CONFIG;
  } catch (const revlin::DomainError& e) {
    last_error = e.what();
    return REVLIN_ERROR_DOMAIN;
  } catch (const revlin::ConditionError& e) {
    last_error = e.what();
    return REVLIN_ERROR_CONDITION;
  } catch (const revlin::TruncationError& e) {
    last_error = e.what();
    return REVLIN_ERROR_TRUNCATION;
  } catch (const std::exception& e) {
    last_error = e.what();
    return REVLIN_ERROR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return REVLIN_ERROR_INTERNAL;
  }
}

revlin_status invalid(const char* what) {
  last_error = what;
  return REVLIN_ERROR_INVALID_ARGUMENT;
}

void reparse(revlin_config& config, revlin::Json candidate) {
  revlin::RunConfig parsed = revlin::parse_config(candidate);
  config.document = std::move(candidate);
  config.parsed = std::move(parsed);
  config.text = revlin::dump(revlin::to_json(config.parsed));
}

void collect_scalars(revlin_result& result, const revlin::Json& section) {
  if (!section.is_object()) return;
  for (const auto& item : section.items()) {
    const auto& v = item.value();
    if (v.is_number()) {
      result.scalars[item.key()] = v.get<double>();
    } else if (v.is_object() && v.contains("value") && v.at("value").is_number()) {
      result.scalars[item.key()] = v.at("value").get<double>();
    }
  }
}

revlin_verdict to_c(revlin::Verdict v) {
  switch (v) {
    case revlin::Verdict::Pass: return REVLIN_VERDICT_PASS;
    case revlin::Verdict::Fail: return REVLIN_VERDICT_FAIL;
    default: return REVLIN_VERDICT_INCONCLUSIVE;
  }
}

std::string coefficients_csv(const revlin::CoefficientFamily& family, long count) {
  std::string out = "i,a\n";
  char line[64];
  for (long k = 0; k < count; ++k) {
    const long i = family.first_index() + k;
    std::snprintf(line, sizeof line, "%ld,%.15g\n", i, revlin::coeff(family, i));
    out += line;
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
}

}  // namespace

extern "C" {

const char* revlin_version(void) { return "1.0.0"; }

const char* revlin_last_error(void) { return last_error.c_str(); }

revlin_status revlin_config_create(revlin_config** out) {
  if (!out) return invalid("revlin_config_create: out is null");
  return guard([&] {
    auto config = std::make_unique<revlin_config>();
    reparse(*config, revlin::Json::object());
    *out = config.release();
  });
}

revlin_status revlin_config_parse(const char* json, revlin_config** out) {
  if (!json || !out) return invalid("revlin_config_parse: null argument");
  return guard([&] {
    revlin::Json doc;
    try {
      doc = revlin::Json::parse(json);
    } catch (const revlin::Json::parse_error& e) {
      throw revlin::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    auto config = std::make_unique<revlin_config>();
    reparse(*config, std::move(doc));
    *out = config.release();
  });
}

revlin_status revlin_config_load(const char* path, revlin_config** out) {
  if (!path || !out) return invalid("revlin_config_load: null argument");
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    last_error = std::string("cannot read config file ") + path;
    return REVLIN_ERROR_CONFIG;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return revlin_config_parse(buffer.str().c_str(), out);
}

void revlin_config_free(revlin_config* config) { delete config; }

revlin_status revlin_config_set_chain(revlin_config* config, const char* shorthand) {
  if (!config || !shorthand) return invalid("revlin_config_set_chain: null argument");
  return guard([&] {
    revlin::Json doc = config->document;
    doc["chain"] = revlin::chain_shorthand(shorthand);
    reparse(*config, std::move(doc));
  });
}

revlin_status revlin_config_set_family(revlin_config* config, const char* shorthand) {
  if (!config || !shorthand) return invalid("revlin_config_set_family: null argument");
  return guard([&] {
    revlin::Json doc = config->document;
    doc["family"] = revlin::family_shorthand(shorthand);
    reparse(*config, std::move(doc));
  });
}

revlin_status revlin_config_set_seed(revlin_config* config, uint64_t seed) {
  if (!config) return invalid("revlin_config_set_seed: null config");
  return guard([&] {
    revlin::Json doc = config->document;
    doc["experiment"]["seed"] = seed;
    reparse(*config, std::move(doc));
  });
}

revlin_status revlin_config_set_threads(revlin_config* config, unsigned threads) {
  if (!config) return invalid("revlin_config_set_threads: null config");
  return guard([&] {
    revlin::Json doc = config->document;
    doc["experiment"]["threads"] = threads;
    reparse(*config, std::move(doc));
  });
}

revlin_status revlin_config_set_output_dir(revlin_config* config, const char* dir) {
  if (!config || !dir) return invalid("revlin_config_set_output_dir: null argument");
  return guard([&] {
    revlin::Json doc = config->document;
    doc["output"]["dir"] = dir;
    reparse(*config, std::move(doc));
  });
}

const char* revlin_config_json(const revlin_config* config) {
  return config ? config->text.c_str() : nullptr;
}

revlin_status revlin_oracle(const revlin_config* config, revlin_result** out) {
  if (!config || !out) return invalid("revlin_oracle: null argument");
  return guard([&] {
    const auto chain = revlin::config_chain(config->parsed);
    if (!chain) throw revlin::ConfigError("oracle: a chain is required (--chain or config.chain)");
    const auto family = revlin::config_family(config->parsed);
    auto result = std::make_unique<revlin_result>();
    const revlin::Json doc = revlin::oracle_report(*chain, family);
    collect_scalars(*result, doc["targets"]);
    bool all = true;
    for (const auto& c : doc["conditions"]) all = all && c["passed"].get<bool>();
    result->scalars["all_conditions_passed"] = all ? 1.0 : 0.0;
    result->verdict = all ? REVLIN_VERDICT_PASS : REVLIN_VERDICT_FAIL;
    result->json = revlin::dump(doc);
    result->output = config->parsed.output;
    *out = result.release();
  });
}

revlin_status revlin_check(const revlin_config* config, revlin_result** out) {
  if (!config || !out) return invalid("revlin_check: null argument");
  return guard([&] {
    const auto chain = revlin::config_chain(config->parsed);
    if (!chain) throw revlin::ConfigError("check: a chain is required (--chain or config.chain)");
    if (config->parsed.mode) revlin::experiment_config(config->parsed);
    auto result = std::make_unique<revlin_result>();
    const revlin::Json doc = revlin::condition_report(*chain);
    const bool all = doc["all_passed"].get<bool>();
    result->scalars["all_conditions_passed"] = all ? 1.0 : 0.0;
    result->verdict = all ? REVLIN_VERDICT_PASS : REVLIN_VERDICT_FAIL;
    result->json = revlin::dump(doc);
    result->output = config->parsed.output;
    *out = result.release();
  });
}

revlin_status revlin_run(const revlin_config* config, revlin_result** out) {
  if (!config || !out) return invalid("revlin_run: null argument");
  return guard([&] {
    const revlin::ExperimentConfig cfg = revlin::experiment_config(config->parsed);
    const revlin::ExperimentReport report = revlin::run_experiment(cfg);
    auto result = std::make_unique<revlin_result>();
    revlin::Json doc = revlin::to_json(report);
    revlin::Json full;
    for (const auto& item : doc.items()) {
      full[item.key()] = item.value();
      if (item.key() == "replicates") full["config"] = revlin::to_json(config->parsed);
    }
    collect_scalars(*result, full["targets"]);
    collect_scalars(*result, full["statistics"]);
    result->verdict = to_c(report.verdict);
    if (!report.samples.empty()) {
      result->csv["samples"] = revlin::path_samples_csv(report.t_grid, report.samples);
    }
    result->json = revlin::dump(full);
    result->output = config->parsed.output;
    *out = result.release();
  });
}

revlin_status revlin_coeffs(const revlin_config* config, revlin_result** out) {
  if (!config || !out) return invalid("revlin_coeffs: null argument");
  return guard([&] {
    const auto family = revlin::config_family(config->parsed);
    if (!family) throw revlin::ConfigError("coeffs: a family is required (--family or config.family)");
    const revlin::RunConfig& cfg = config->parsed;
    if (cfg.n < 1) throw revlin::ConfigError("experiment.n must be >= 1");
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw revlin::ConfigError("experiment.eps must lie in (0, 1)");
    revlin::WindowOptions window;
    window.max_window = cfg.max_window;

    auto result = std::make_unique<revlin_result>();
    revlin::Json doc;
    doc["schema_version"] = revlin::kSchemaVersion;
    doc["kind"] = "coefficients_report";
    doc["family"] = revlin::to_json(*family);
    doc["n"] = cfg.n;
    doc["first_index"] = family->first_index();
    doc["beta"] = revlin::number(family->beta());
    doc["summable"] = family->summable();
    if (family->summable()) doc["abs_sum"] = revlin::number(revlin::abs_sum(*family));
    revlin::Json notes = revlin::Json::array();

    const auto exact = revlin::bn2_exact(*family, cfg.n);
    doc["bn2_exact"] = exact ? revlin::number(*exact) : revlin::Json(nullptr);
    try {
      const revlin::WeightProfile profile = revlin::weight_profile(*family, cfg.n, cfg.eps, window);
      doc["window"] = {{"eps", revlin::number(cfg.eps)},
                       {"j_min", profile.j_min},
                       {"j_max", profile.j_max},
                       {"length", profile.size()},
                       {"retained_bn2", revlin::number(profile.bn2)},
                       {"tail_bound", revlin::number(profile.tail_bound)},
                       {"tail_fraction", revlin::number(profile.tail_fraction)}};
      result->scalars["window_length"] = static_cast<double>(profile.size());
      if (cfg.output.weights_csv) result->csv["weights"] = revlin::weight_profile_csv(profile);
    } catch (const revlin::TruncationError& e) {
      doc["window"] = nullptr;
      notes.push_back(std::string("window: ") + e.what());
    }
    const double bn2 = exact ? *exact : revlin::bn2_value(*family, cfg.n, cfg.eps, window);
    doc["bn2"] = revlin::number(bn2);
    result->scalars["bn2"] = bn2;
    result->scalars["beta"] = family->beta();

    std::vector<double> t_grid;
    if (cfg.t_grid) {
      t_grid = *cfg.t_grid;
    } else {
      // Default dyadic grid, dropping points with [n t] = 0.
      for (double t : {0.0625, 0.125, 0.25, 0.5, 1.0})
        if (std::floor(static_cast<double>(cfg.n) * t) >= 1.0) t_grid.push_back(t);
    }
    try {
      const revlin::RegVarDiagnostic diag = revlin::regvar_diagnostic(*family, cfg.n, t_grid, cfg.eps, window);
      doc["regvar"] = revlin::to_json(diag);
      result->scalars["fitted_beta"] = diag.fitted_slope;
    } catch (const revlin::TruncationError& e) {
      doc["regvar"] = nullptr;
      notes.push_back(std::string("regvar: ") + e.what());
    }
    doc["coefficient_count"] = cfg.coefficient_count;
    doc["notes"] = notes;
    result->csv["coefficients"] = coefficients_csv(*family, cfg.coefficient_count);
    result->json = revlin::dump(doc);
    result->output = cfg.output;
    *out = result.release();
  });
}

const char* revlin_result_json(const revlin_result* result) {
  return result ? result->json.c_str() : nullptr;
}

revlin_verdict revlin_result_verdict(const revlin_result* result) {
  return result ? result->verdict : REVLIN_VERDICT_NONE;
}

revlin_status revlin_result_scalar(const revlin_result* result, const char* name, double* out) {
  if (!result || !name || !out) return invalid("revlin_result_scalar: null argument");
  const auto it = result->scalars.find(name);
  if (it == result->scalars.end()) return invalid("revlin_result_scalar: no such scalar");
  *out = it->second;
  return REVLIN_OK;
}

const char* revlin_result_csv(const revlin_result* result, const char* name) {
  if (!result || !name) return nullptr;
  const auto it = result->csv.find(name);
  return it == result->csv.end() ? nullptr : it->second.c_str();
}

revlin_status revlin_result_write(const revlin_result* result, const char* dir) {
  if (!result) return invalid("revlin_result_write: null result");
  const std::string target = dir ? std::string(dir) : result->output.dir.value_or("");
  if (target.empty()) return invalid("revlin_result_write: no output directory");
  try {
    last_error.clear();
    const std::filesystem::path root(target);
    std::filesystem::create_directories(root);
    write_file(root / result->output.report, result->json + "\n");
    const std::pair<const char*, const std::optional<std::string>*> files[] = {
        {"samples", &result->output.samples_csv},
        {"weights", &result->output.weights_csv},
        {"coefficients", &result->output.coefficients_csv}};
    for (const auto& [name, file] : files) {
      const auto it = result->csv.find(name);
      if (it == result->csv.end()) continue;
      write_file(root / file->value_or(std::string(name) + ".csv"), it->second);
    }
    return REVLIN_OK;
  } catch (const std::exception& e) {
    last_error = e.what();
    return REVLIN_ERROR_IO;
  }
}

void revlin_result_free(revlin_result* result) { delete result; }

}  // extern "C"
