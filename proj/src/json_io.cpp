#include "revlin/json_io.hpp"

#include <cmath>
#include <complex>
#include <initializer_list>
#include <sstream>

#include "revlin/errors.hpp"
#include "revlin/numeric.hpp"

namespace revlin {

namespace {

void reject_unknown(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  return obj.at(key);
}

double as_double(const Json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

long as_long(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<long>();
}

std::string as_string(const Json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> as_doubles(const Json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_double(x, where));
  return out;
}

std::vector<long> as_longs(const Json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<long> out;
  for (const auto& x : v) out.push_back(as_long(x, where));
  return out;
}

double number_field(const Json& obj, const char* key, const std::string& where) {
  return as_double(field(obj, key, where), where + "." + key);
}

// Domain errors raised while building specs from a document are configuration errors.
template <class Fn>
auto build(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double parse_number(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": '" + text + "' is not a number");
  }
  if (used != text.size()) throw ConfigError(where + ": '" + text + "' is not a number");
  return v;
}

Json shorthand_value(const std::string& text, const std::string& where) {
  const double v = parse_number(text, where);
  if (std::floor(v) == v && std::abs(v) < 1e15 && text.find_first_of(".eE") == std::string::npos) {
    return static_cast<long>(v);
  }
  return v;
}

// "kind:k=v,k=v" -> (kind, [(k, v)])
std::pair<std::string, std::vector<std::pair<std::string, std::string>>> split_shorthand(
    const std::string& text, const std::string& where) {
  const auto colon = text.find(':');
  std::pair<std::string, std::vector<std::pair<std::string, std::string>>> out;
  out.first = text.substr(0, colon);
  if (out.first.empty()) throw ConfigError(where + ": missing kind in '" + text + "'");
  if (colon == std::string::npos) return out;
  for (const auto& part : split(text.substr(colon + 1), ',')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(where + ": expected key=value, got '" + part + "'");
    out.second.emplace_back(part.substr(0, eq), part.substr(eq + 1));
  }
  return out;
}

Json tolerances_json(const Tolerances& t) {
  Json j;
  j["variance_ratio"] = number(t.variance_ratio);
  j["covariance"] = number(t.covariance);
  j["ks"] = number(t.ks);
  j["mean_se"] = number(t.mean_se);
  j["separation_se"] = number(t.separation_se);
  j["maximal_se"] = number(t.maximal_se);
  j["key1_factor"] = number(t.key1_factor);
  return j;
}

Json matrix_json(const std::vector<std::vector<double>>& m) {
  Json out = Json::array();
  for (const auto& row : m) {
    Json r = Json::array();
    for (double v : row) r.push_back(number(v));
    out.push_back(r);
  }
  return out;
}

}  // namespace

// --- chain / family -------------------------------------------------------------

ChainSpec chain_from_json(const Json& j) {
  const std::string where = "chain";
  if (!j.is_object()) throw ConfigError("chain: expected an object");
  const std::string kind = as_string(field(j, "kind", where), "chain.kind");
  if (kind == "mh") {
    reject_unknown(j, {"kind", "a", "q"}, where);
    return build(where, [&] {
      return ChainSpec(MHChainSpec(number_field(j, "a", where), number_field(j, "q", where)));
    });
  }
  if (kind == "gaussian") {
    reject_unknown(j, {"kind", "r", "hermite"}, where);
    return build(where, [&] {
      return ChainSpec(GaussianChainSpec(number_field(j, "r", where),
                                         as_doubles(field(j, "hermite", where), "chain.hermite")));
    });
  }
  if (kind == "group") {
    reject_unknown(j, {"kind", "m", "step_pmf", "fourier"}, where);
    const long m = as_long(field(j, "m", where), "chain.m");
    if (m < 2 || m > 1'000'000) throw ConfigError("chain.m must lie in [2, 10^6]");
    const std::vector<double> pmf = as_doubles(field(j, "step_pmf", where), "chain.step_pmf");
    std::vector<std::complex<double>> fhat(static_cast<std::size_t>(m), 0.0);
    const Json& fourier = field(j, "fourier", where);
    if (!fourier.is_array()) throw ConfigError("chain.fourier: expected an array");
    for (const auto& entry : fourier) {
      reject_unknown(entry, {"j", "re", "im"}, "chain.fourier[]");
      const long idx = as_long(field(entry, "j", "chain.fourier[]"), "chain.fourier[].j");
      if (idx < 0 || idx >= m) throw ConfigError("chain.fourier[].j must lie in [0, m)");
      const double re = entry.contains("re") ? as_double(entry.at("re"), "chain.fourier[].re") : 0.0;
      const double im = entry.contains("im") ? as_double(entry.at("im"), "chain.fourier[].im") : 0.0;
      fhat[static_cast<std::size_t>(idx)] = {re, im};
    }
    return build(where, [&] { return ChainSpec(GroupWalkSpec(static_cast<int>(m), pmf, fhat)); });
  }
  throw ConfigError("chain.kind: unknown chain '" + kind + "' (expected mh, gaussian or group)");
}

Json to_json(const ChainSpec& chain) {
  Json j;
  if (const auto* mh = std::get_if<MHChainSpec>(&chain)) {
    j["kind"] = "mh";
    j["a"] = number(mh->nu_exponent());
    j["q"] = number(mh->g_exponent());
  } else if (const auto* g = std::get_if<GaussianChainSpec>(&chain)) {
    j["kind"] = "gaussian";
    j["r"] = number(g->autocorr());
    Json c = Json::array();
    for (double v : g->hermite_coeffs()) c.push_back(number(v));
    j["hermite"] = c;
  } else {
    const auto& w = std::get<GroupWalkSpec>(chain);
    j["kind"] = "group";
    j["m"] = w.modulus();
    Json pmf = Json::array();
    for (double v : w.step_pmf()) pmf.push_back(number(v));
    j["step_pmf"] = pmf;
    Json fourier = Json::array();
    for (std::size_t k = 0; k < w.fourier_coeffs().size(); ++k) {
      const auto c = w.fourier_coeffs()[k];
      if (c == std::complex<double>(0.0, 0.0)) continue;
      fourier.push_back({{"j", k}, {"re", number(c.real())}, {"im", number(c.imag())}});
    }
    j["fourier"] = fourier;
  }
  return j;
}

CoefficientFamily family_from_json(const Json& j) {
  const std::string where = "family";
  if (!j.is_object()) throw ConfigError("family: expected an object");
  const std::string kind = as_string(field(j, "kind", where), "family.kind");
  auto alpha = [&] {
    reject_unknown(j, {"kind", "alpha"}, where);
    return number_field(j, "alpha", where);
  };
  return build(where, [&]() -> CoefficientFamily {
    if (kind == "power_law") return CoefficientFamily(PowerLaw{alpha()});
    if (kind == "power_diff") return CoefficientFamily(PowerDiff{alpha()});
    if (kind == "log_power") return CoefficientFamily(LogPower{alpha()});
    if (kind == "frac_int") {
      reject_unknown(j, {"kind", "d"}, where);
      return CoefficientFamily(FracInt{number_field(j, "d", where)});
    }
    if (kind == "geometric") {
      reject_unknown(j, {"kind", "ratio", "scale"}, where);
      const double scale = j.contains("scale") ? as_double(j.at("scale"), "family.scale") : 1.0;
      return CoefficientFamily(Geometric{number_field(j, "ratio", where), scale});
    }
    if (kind == "delta") {
      reject_unknown(j, {"kind"}, where);
      return CoefficientFamily(Delta{});
    }
    throw ConfigError("family.kind: unknown family '" + kind + "'");
  });
}

Json to_json(const CoefficientFamily& family) {
  Json j;
  j["kind"] = family.name();
  if (const auto* f = family.get_if<PowerLaw>()) j["alpha"] = number(f->alpha);
  if (const auto* f = family.get_if<PowerDiff>()) j["alpha"] = number(f->alpha);
  if (const auto* f = family.get_if<LogPower>()) j["alpha"] = number(f->alpha);
  if (const auto* f = family.get_if<FracInt>()) j["d"] = number(f->d);
  if (const auto* f = family.get_if<Geometric>()) {
    j["ratio"] = number(f->ratio);
    j["scale"] = number(f->scale);
  }
  return j;
}

Json chain_shorthand(const std::string& text) {
  const std::string where = "--chain";
  const auto [kind, pairs] = split_shorthand(text, where);
  Json j;
  j["kind"] = kind;
  if (kind == "group") {
    long m = 0;
    std::vector<long> steps;
    std::vector<std::pair<long, std::complex<double>>> coeffs;
    auto coeff_at = [&](long idx) -> std::complex<double>& {
      for (auto& c : coeffs) {
        if (c.first == idx) return c.second;
      }
      coeffs.emplace_back(idx, 0.0);
      return coeffs.back().second;
    };
    for (const auto& [key, value] : pairs) {
      if (key == "m") {
        m = static_cast<long>(parse_number(value, where + " m"));
      } else if (key == "steps") {
        for (const auto& s : split(value, '/')) steps.push_back(static_cast<long>(parse_number(s, where + " steps")));
      } else if ((key[0] == 'f' || key[0] == 'i') && key.size() > 1 &&
                 key.find_first_not_of("0123456789", 1) == std::string::npos) {
        const long idx = std::stol(key.substr(1));
        const double v = parse_number(value, where + " " + key);
        auto& c = coeff_at(idx);
        c = key[0] == 'f' ? std::complex<double>(v, c.imag()) : std::complex<double>(c.real(), v);
      } else {
        throw ConfigError(where + ": unknown group key '" + key + "'");
      }
    }
    if (m < 2) throw ConfigError(where + ": group needs m >= 2");
    if (steps.empty()) throw ConfigError(where + ": group needs steps=s1/s2/...");
    std::vector<double> pmf(static_cast<std::size_t>(m), 0.0);
    for (long s : steps) {
      const long r = ((s % m) + m) % m;
      pmf[static_cast<std::size_t>(r)] += 1.0 / static_cast<double>(steps.size());
    }
    j["m"] = m;
    j["step_pmf"] = pmf;
    Json fourier = Json::array();
    for (const auto& [idx, c] : coeffs) fourier.push_back({{"j", idx}, {"re", c.real()}, {"im", c.imag()}});
    j["fourier"] = fourier;
    return j;
  }
  for (const auto& [key, value] : pairs) {
    if (kind == "gaussian" && key == "hermite") {
      Json c = Json::array();
      for (const auto& s : split(value, '/')) c.push_back(parse_number(s, where + " hermite"));
      j[key] = c;
    } else {
      j[key] = shorthand_value(value, where + " " + key);
    }
  }
  return j;
}

Json family_shorthand(const std::string& text) {
  const auto [kind, pairs] = split_shorthand(text, "--family");
  Json j;
  j["kind"] = kind;
  for (const auto& [key, value] : pairs) j[key] = shorthand_value(value, "--family " + key);
  return j;
}

// --- config -----------------------------------------------------------------------

RunConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

RunConfig parse_config(const Json& doc) {
  RunConfig cfg;
  reject_unknown(doc, {"chain", "family", "experiment", "output"}, "config");
  if (doc.contains("chain")) {
    cfg.chain_json = doc.at("chain");
    chain_from_json(cfg.chain_json);
  }
  if (doc.contains("family")) {
    cfg.family_json = doc.at("family");
    family_from_json(cfg.family_json);
  }
  if (doc.contains("experiment")) {
    const Json& e = doc.at("experiment");
    reject_unknown(e,
                   {"mode", "n", "replicates", "t_grid", "eps", "seed", "threads", "max_window",
                    "keep_samples", "key1_n", "coefficient_count", "tolerances"},
                   "experiment");
    if (e.contains("mode")) {
      cfg.mode = as_string(e.at("mode"), "experiment.mode");
      parse_mode(*cfg.mode);
    }
    if (e.contains("n")) cfg.n = as_long(e.at("n"), "experiment.n");
    if (e.contains("replicates")) cfg.replicates = as_long(e.at("replicates"), "experiment.replicates");
    if (e.contains("t_grid")) cfg.t_grid = as_doubles(e.at("t_grid"), "experiment.t_grid");
    if (e.contains("eps")) cfg.eps = as_double(e.at("eps"), "experiment.eps");
    if (e.contains("seed")) {
      const Json& s = e.at("seed");
      if (!s.is_number_unsigned()) throw ConfigError("experiment.seed: expected a nonnegative integer");
      cfg.seed = s.get<std::uint64_t>();
    }
    if (e.contains("threads")) {
      const long t = as_long(e.at("threads"), "experiment.threads");
      if (t < 1 || t > 1024) throw ConfigError("experiment.threads must lie in [1, 1024]");
      cfg.threads = static_cast<unsigned>(t);
    }
    if (e.contains("max_window")) {
      cfg.max_window = as_long(e.at("max_window"), "experiment.max_window");
      if (cfg.max_window < 1) throw ConfigError("experiment.max_window must be >= 1");
    }
    if (e.contains("keep_samples")) {
      if (!e.at("keep_samples").is_boolean()) throw ConfigError("experiment.keep_samples: expected a boolean");
      cfg.keep_samples = e.at("keep_samples").get<bool>();
    }
    if (e.contains("key1_n")) cfg.key1_n = as_longs(e.at("key1_n"), "experiment.key1_n");
    if (e.contains("coefficient_count")) {
      cfg.coefficient_count = as_long(e.at("coefficient_count"), "experiment.coefficient_count");
      if (cfg.coefficient_count < 0) throw ConfigError("experiment.coefficient_count must be >= 0");
    }
    if (e.contains("tolerances")) {
      const Json& t = e.at("tolerances");
      reject_unknown(t,
                     {"variance_ratio", "covariance", "ks", "mean_se", "separation_se", "maximal_se",
                      "key1_factor"},
                     "experiment.tolerances");
      auto set = [&](const char* key, double& target) {
        if (t.contains(key)) target = as_double(t.at(key), std::string("experiment.tolerances.") + key);
      };
      set("variance_ratio", cfg.tolerances.variance_ratio);
      set("covariance", cfg.tolerances.covariance);
      set("ks", cfg.tolerances.ks);
      set("mean_se", cfg.tolerances.mean_se);
      set("separation_se", cfg.tolerances.separation_se);
      set("maximal_se", cfg.tolerances.maximal_se);
      set("key1_factor", cfg.tolerances.key1_factor);
    }
  }
  if (doc.contains("output")) {
    const Json& o = doc.at("output");
    reject_unknown(o, {"dir", "report", "samples_csv", "weights_csv", "coefficients_csv"}, "output");
    auto opt = [&](const char* key, std::optional<std::string>& target) {
      if (o.contains(key) && !o.at(key).is_null()) target = as_string(o.at(key), std::string("output.") + key);
    };
    opt("dir", cfg.output.dir);
    if (o.contains("report")) cfg.output.report = as_string(o.at("report"), "output.report");
    opt("samples_csv", cfg.output.samples_csv);
    opt("weights_csv", cfg.output.weights_csv);
    opt("coefficients_csv", cfg.output.coefficients_csv);
  }
  return cfg;
}

Json to_json(const RunConfig& cfg) {
  Json j;
  if (!cfg.chain_json.is_null()) j["chain"] = to_json(chain_from_json(cfg.chain_json));
  if (!cfg.family_json.is_null()) j["family"] = to_json(family_from_json(cfg.family_json));
  Json e;
  if (cfg.mode) e["mode"] = *cfg.mode;
  e["n"] = cfg.n;
  e["replicates"] = cfg.replicates;
  if (cfg.t_grid) {
    Json t = Json::array();
    for (double v : *cfg.t_grid) t.push_back(number(v));
    e["t_grid"] = t;
  }
  e["eps"] = number(cfg.eps);
  e["seed"] = cfg.seed;
  e["max_window"] = cfg.max_window;
  e["keep_samples"] = cfg.keep_samples;
  e["coefficient_count"] = cfg.coefficient_count;
  if (!cfg.key1_n.empty()) e["key1_n"] = cfg.key1_n;
  e["tolerances"] = tolerances_json(cfg.tolerances);
  j["experiment"] = e;
  return j;
}

std::optional<ChainSpec> config_chain(const RunConfig& cfg) {
  if (cfg.chain_json.is_null()) return std::nullopt;
  return chain_from_json(cfg.chain_json);
}

std::optional<CoefficientFamily> config_family(const RunConfig& cfg) {
  if (cfg.family_json.is_null()) return std::nullopt;
  return family_from_json(cfg.family_json);
}

ExperimentConfig experiment_config(const RunConfig& cfg) {
  const auto chain = config_chain(cfg);
  const auto family = config_family(cfg);
  if (!chain) throw ConfigError("config: the run command needs a chain section");
  if (!family) throw ConfigError("config: the run command needs a family section");
  if (!cfg.mode) throw ConfigError("config: experiment.mode is required");
  ExperimentConfig out(*chain, *family);
  out.mode = parse_mode(*cfg.mode);
  out.n = cfg.n;
  out.replicates = cfg.replicates;
  if (cfg.t_grid) out.t_grid = *cfg.t_grid;
  out.eps = cfg.eps;
  out.seed = cfg.seed;
  out.tolerances = cfg.tolerances;
  out.window.max_window = cfg.max_window;
  out.threads = cfg.threads;
  out.keep_samples = cfg.keep_samples || cfg.output.samples_csv.has_value();
  out.key1_n = cfg.key1_n;
  validate(out);
  return out;
}

// --- reports ----------------------------------------------------------------------

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_sig15(x);
}

Json to_json(const ConditionReport& report) {
  Json out = Json::array();
  for (const auto& r : report.results) {
    out.push_back({{"name", r.name},
                   {"passed", r.passed},
                   {"value", number(r.value)},
                   {"margin", number(r.margin)},
                   {"note", r.note}});
  }
  return out;
}

Json to_json(const LimitTargets& t) {
  Json j;
  j["sigma2"] = number(t.sigma2);
  j["two_pi_h0"] = number(t.two_pi_h0);
  if (t.blocked_projection) j["blocked_projection_sum"] = number(*t.blocked_projection);
  if (t.beta) j["beta"] = number(*t.beta);
  if (t.hurst) j["hurst"] = number(*t.hurst);
  if (t.abs_sum) j["abs_sum"] = number(*t.abs_sum);
  if (t.eta_alternative) j["eta_alternative"] = number(*t.eta_alternative);
  return j;
}

Json to_json(const ExperimentReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "experiment_report";
  j["mode"] = mode_name(report.mode);
  j["seed"] = report.seed;
  j["n"] = report.n;
  j["replicates"] = report.replicates;
  Json stats = Json::object();
  for (const auto& s : report.statistics) {
    Json entry;
    entry["value"] = number(s.value);
    entry["se"] = s.se ? number(*s.se) : Json(nullptr);
    stats[s.name] = entry;
  }
  j["statistics"] = stats;
  Json targets = Json::object();
  for (const auto& [name, value] : report.targets) targets[name] = number(value);
  j["targets"] = targets;
  if (!report.empirical.empty()) {
    Json t = Json::array();
    for (double v : report.t_grid) t.push_back(number(v));
    j["covariance"] = {{"t_grid", t}, {"empirical", matrix_json(report.empirical)},
                       {"expected", matrix_json(report.expected)}};
  }
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"estimate", number(c.estimate)},
                      {"se", number(c.se)},
                      {"target", number(c.target)},
                      {"tolerance", number(c.tolerance)},
                      {"kind", c.kind},
                      {"verdict", verdict_name(c.verdict)},
                      {"note", c.note}});
  }
  j["checks"] = checks;
  j["notes"] = report.notes;
  j["verdict"] = verdict_name(report.verdict);
  j["runtime"] = {{"seconds", number(report.runtime_seconds)}};
  return j;
}

Json to_json(const RegVarDiagnostic& d) {
  Json j;
  j["n"] = d.n;
  j["beta"] = number(d.beta);
  Json rows = Json::array();
  for (const auto& r : d.rows) {
    rows.push_back({{"t", number(r.t)}, {"ratio", number(r.ratio)}, {"reference", number(r.reference)}});
  }
  j["rows"] = rows;
  j["fit_n"] = d.fit_n;
  j["fitted_beta"] = number(d.fitted_slope);
  return j;
}

Json oracle_report(const ChainSpec& chain, const std::optional<CoefficientFamily>& family) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "oracle_report";
  j["chain"] = to_json(chain);
  if (family) j["family"] = to_json(*family);
  const CovarianceModel model = CovarianceModel::from_chain(chain);
  j["model"] = model.kind_name();
  Json notes = Json::array();
  try {
    j["targets"] = to_json(limit_targets(chain, family));
  } catch (const ConditionError& e) {
    j["targets"] = nullptr;
    notes.push_back(std::string("targets unavailable: ") + e.what());
  }
  j["conditions"] = to_json(check_conditions(model));
  if (std::holds_alternative<MHChainSpec>(chain)) {
    notes.push_back(
        "sigma2 is the covariance-sum value a[2/(2q+a-1) - 1/(2q+a)]; the competing closed form "
        "a[1/(2q+a) + 2/(2q+a-1)] is listed as eta_alternative and differs by 2 cov(0)");
  }
  j["notes"] = notes;
  return j;
}

Json condition_report(const ChainSpec& chain) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "condition_report";
  j["chain"] = to_json(chain);
  const ConditionReport report = check_conditions(CovarianceModel::from_chain(chain));
  j["conditions"] = to_json(report);
  j["all_passed"] = report.all_passed();
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace revlin
