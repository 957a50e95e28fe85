// revlin command-line front end. Talks to the library through the C API only.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "revlin/revlin.h"

namespace {

enum ExitCode { kPass = 0, kFail = 1, kUsage = 2, kInconclusive = 3 };

struct Options {
  std::string config_path;
  std::string chain;
  std::string family;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool strict = false;
  std::string out;
};

int report_error(revlin_status status, const char* where) {
  std::cerr << "revlin " << where << ": " << revlin_last_error() << '\n';
  switch (status) {
    case REVLIN_ERROR_CONDITION:
    case REVLIN_ERROR_INTERNAL:
      return kFail;
    default:
      return kUsage;
  }
}

int execute(const std::string& command, const Options& opt, const CLI::App& sub) {
  revlin_config* config = nullptr;
  revlin_status status = opt.config_path.empty()
                             ? revlin_config_create(&config)
                             : revlin_config_load(opt.config_path.c_str(), &config);
  if (status != REVLIN_OK) return report_error(status, "config");

  struct Guard {
    revlin_config* config;
    revlin_result* result = nullptr;
    ~Guard() {
      revlin_result_free(result);
      revlin_config_free(config);
    }
  } guard{config};

  if (!opt.chain.empty()) status = revlin_config_set_chain(config, opt.chain.c_str());
  if (status == REVLIN_OK && !opt.family.empty())
    status = revlin_config_set_family(config, opt.family.c_str());
  if (status == REVLIN_OK && sub.count("--seed")) status = revlin_config_set_seed(config, opt.seed);
  if (status == REVLIN_OK && sub.count("--threads"))
    status = revlin_config_set_threads(config, opt.threads);
  if (status == REVLIN_OK && !opt.out.empty())
    status = revlin_config_set_output_dir(config, opt.out.c_str());
  if (status != REVLIN_OK) return report_error(status, "config");

  if (command == "oracle") {
    status = revlin_oracle(config, &guard.result);
  } else if (command == "run") {
    status = revlin_run(config, &guard.result);
  } else if (command == "coeffs") {
    status = revlin_coeffs(config, &guard.result);
  } else {
    status = revlin_check(config, &guard.result);
  }
  if (status != REVLIN_OK) return report_error(status, command.c_str());

  std::cout << revlin_result_json(guard.result) << '\n';

  // INVALID_ARGUMENT here means neither --out nor output.dir was given.
  status = revlin_result_write(guard.result, nullptr);
  if (status != REVLIN_OK && status != REVLIN_ERROR_INVALID_ARGUMENT)
    return report_error(status, "write");

  const revlin_verdict verdict = revlin_result_verdict(guard.result);
  if (command == "run") {
    if (verdict == REVLIN_VERDICT_FAIL) return kFail;
    if (verdict == REVLIN_VERDICT_INCONCLUSIVE) return kInconclusive;
    return kPass;
  }
  if (command == "check") return verdict == REVLIN_VERDICT_FAIL ? kFail : kPass;
  if (command == "oracle" && opt.strict && verdict == REVLIN_VERDICT_FAIL) return kFail;
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial sums of linear processes driven by reversible Markov chains"};
  app.set_version_flag("--version", std::string(revlin_version()));
  app.require_subcommand(1);

  Options opt;
  const struct {
    const char* name;
    const char* help;
  } commands[] = {
      {"oracle", "Print limit targets and condition checks for a chain"},
      {"run", "Run the Monte Carlo experiment selected by experiment.mode"},
      {"coeffs", "Print coefficients, weight window and regular-variation diagnostics"},
      {"check", "Validate the configuration and evaluate the condition checks"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opt.config_path, "JSON configuration file");
    sub->add_option("--chain", opt.chain, "Chain shorthand, e.g. mh:a=1,q=1");
    sub->add_option("--family", opt.family, "Coefficient family shorthand, e.g. frac_int:d=0.25");
    sub->add_option("--seed", opt.seed, "Master seed");
    sub->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--strict", opt.strict, "oracle: exit 1 when a condition fails");
    sub->add_option("--out", opt.out, "Directory for report.json and CSV files");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  for (CLI::App* sub : app.get_subcommands()) return execute(sub->get_name(), opt, *sub);
  return kUsage;
}
