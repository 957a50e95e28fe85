#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "revlin/revlin.h"

namespace {

struct Config {
  revlin_config* ptr = nullptr;
  ~Config() { revlin_config_free(ptr); }
};

struct Result {
  revlin_result* ptr = nullptr;
  ~Result() { revlin_result_free(ptr); }
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("null handles", "[capi]") {
  CHECK(revlin_config_create(nullptr) == REVLIN_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(revlin_last_error()).size() > 0);
  revlin_result* out = nullptr;
  CHECK(revlin_oracle(nullptr, &out) == REVLIN_ERROR_INVALID_ARGUMENT);
  CHECK(revlin_config_set_seed(nullptr, 1) == REVLIN_ERROR_INVALID_ARGUMENT);
  CHECK(revlin_result_verdict(nullptr) == REVLIN_VERDICT_NONE);
  CHECK(revlin_result_csv(nullptr, "samples") == nullptr);
  revlin_config_free(nullptr);
  revlin_result_free(nullptr);
  CHECK(std::string(revlin_version()).size() > 0);
}

TEST_CASE("config errors map to status codes", "[capi]") {
  Config c;
  CHECK(revlin_config_parse("{", &c.ptr) == REVLIN_ERROR_CONFIG);
  CHECK(c.ptr == nullptr);
  CHECK(revlin_config_parse(R"({"bogus": 1})", &c.ptr) == REVLIN_ERROR_CONFIG);
  CHECK(revlin_config_load("/nonexistent/revlin.json", &c.ptr) != REVLIN_OK);

  REQUIRE(revlin_config_create(&c.ptr) == REVLIN_OK);
  CHECK(revlin_config_set_chain(c.ptr, "mh:a=1") == REVLIN_ERROR_CONFIG);
  // Out-of-domain values in a configuration are configuration errors.
  CHECK(revlin_config_set_chain(c.ptr, "mh:a=0.1,q=0.1") == REVLIN_ERROR_CONFIG);
  CHECK(revlin_config_set_threads(c.ptr, 0) != REVLIN_OK);
  // A rejected setter leaves the configuration untouched.
  CHECK(std::string(revlin_config_json(c.ptr)).find("\"chain\"") == std::string::npos);

  Result r;
  CHECK(revlin_oracle(c.ptr, &r.ptr) == REVLIN_ERROR_CONFIG);
  CHECK(revlin_run(c.ptr, &r.ptr) == REVLIN_ERROR_CONFIG);
}

TEST_CASE("oracle through the C API", "[capi]") {
  Config c;
  REQUIRE(revlin_config_create(&c.ptr) == REVLIN_OK);
  REQUIRE(revlin_config_set_chain(c.ptr, "mh:a=1,q=1") == REVLIN_OK);
  Result r;
  REQUIRE(revlin_oracle(c.ptr, &r.ptr) == REVLIN_OK);
  double sigma2 = 0.0;
  REQUIRE(revlin_result_scalar(r.ptr, "sigma2", &sigma2) == REVLIN_OK);
  CHECK_THAT(sigma2, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-14));
  CHECK(revlin_result_scalar(r.ptr, "no_such_scalar", &sigma2) == REVLIN_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(revlin_result_json(r.ptr)).find("oracle_report") != std::string::npos);
  CHECK(revlin_result_verdict(r.ptr) == REVLIN_VERDICT_PASS);
  CHECK(revlin_result_write(r.ptr, nullptr) == REVLIN_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("non-ergodic chain is a condition error", "[capi]") {
  Config c;
  REQUIRE(revlin_config_create(&c.ptr) == REVLIN_OK);
  REQUIRE(revlin_config_set_chain(c.ptr, "group:m=6,steps=2/4,f3=1") == REVLIN_OK);
  Result r;
  CHECK(revlin_oracle(c.ptr, &r.ptr) == REVLIN_ERROR_CONDITION);
}

TEST_CASE("run and write through the C API", "[capi]") {
  const char* text = R"({
    "chain": {"kind": "mh", "a": 1, "q": 1},
    "family": {"kind": "delta"},
    "experiment": {"mode": "clt", "n": 100, "replicates": 500, "seed": 3, "keep_samples": true}
  })";
  Config c;
  REQUIRE(revlin_config_parse(text, &c.ptr) == REVLIN_OK);
  Result a;
  REQUIRE(revlin_run(c.ptr, &a.ptr) == REVLIN_OK);
  REQUIRE(revlin_config_set_threads(c.ptr, 4) == REVLIN_OK);
  Result b;
  REQUIRE(revlin_run(c.ptr, &b.ptr) == REVLIN_OK);
  double va = 0.0, vb = 0.0;
  REQUIRE(revlin_result_scalar(a.ptr, "variance_ratio", &va) == REVLIN_OK);
  REQUIRE(revlin_result_scalar(b.ptr, "variance_ratio", &vb) == REVLIN_OK);
  CHECK(va == vb);
  const char* csv = revlin_result_csv(a.ptr, "samples");
  REQUIRE(csv != nullptr);
  CHECK(std::string(csv).rfind("replicate_id,t,W\n", 0) == 0);
  CHECK(std::string(revlin_result_csv(a.ptr, "samples")) == revlin_result_csv(b.ptr, "samples"));

  const auto dir = std::filesystem::temp_directory_path() / "revlin_capi_test";
  std::filesystem::remove_all(dir);
  REQUIRE(revlin_result_write(a.ptr, dir.string().c_str()) == REVLIN_OK);
  CHECK(slurp(dir / "report.json") == std::string(revlin_result_json(a.ptr)) + "\n");
  CHECK(slurp(dir / "samples.csv") == csv);
  std::filesystem::remove_all(dir);
}

TEST_CASE("coefficients through the C API", "[capi]") {
  Config c;
  REQUIRE(revlin_config_parse(R"({"family": {"kind": "frac_int", "d": 0.25},
                                  "experiment": {"n": 64, "eps": 0.01}})", &c.ptr) == REVLIN_OK);
  Result r;
  REQUIRE(revlin_coeffs(c.ptr, &r.ptr) == REVLIN_OK);
  double bn2 = 0.0;
  CHECK(revlin_result_scalar(r.ptr, "bn2", &bn2) == REVLIN_OK);
  CHECK(bn2 > 0.0);
  CHECK(revlin_result_csv(r.ptr, "coefficients") != nullptr);
  CHECK(revlin_result_csv(r.ptr, "weights") == nullptr);
}
