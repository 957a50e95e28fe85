#ifndef REVLIN_REVLIN_H
#define REVLIN_REVLIN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#  define REVLIN_API __declspec(dllexport)
#else
#  define REVLIN_API __attribute__((visibility("default")))
#endif

/* Opaque handles. */
typedef struct revlin_config revlin_config;
typedef struct revlin_result revlin_result;

typedef enum {
  REVLIN_OK = 0,
  REVLIN_ERROR_INVALID_ARGUMENT = 1, /* null handle or pointer */
  REVLIN_ERROR_CONFIG = 2,           /* malformed or incomplete configuration */
  REVLIN_ERROR_DOMAIN = 3,           /* parameter outside its domain */
  REVLIN_ERROR_CONDITION = 4,        /* a required condition check failed */
  REVLIN_ERROR_TRUNCATION = 5,       /* no certified window within the cap */
  REVLIN_ERROR_IO = 6,
  REVLIN_ERROR_INTERNAL = 7
} revlin_status;

typedef enum {
  REVLIN_VERDICT_NONE = -1,
  REVLIN_VERDICT_PASS = 0,
  REVLIN_VERDICT_FAIL = 1,
  REVLIN_VERDICT_INCONCLUSIVE = 3
} revlin_verdict;

REVLIN_API const char* revlin_version(void);

/* Message for the last failed call on this thread; "" if none. */
REVLIN_API const char* revlin_last_error(void);

/* --- configuration ----------------------------------------------------- */

REVLIN_API revlin_status revlin_config_create(revlin_config** out);
REVLIN_API revlin_status revlin_config_parse(const char* json, revlin_config** out);
REVLIN_API revlin_status revlin_config_load(const char* path, revlin_config** out);
REVLIN_API void revlin_config_free(revlin_config* config);

/* Shorthand "mh:a=1,q=1", "frac_int:d=0.25", ... replacing the section. */
REVLIN_API revlin_status revlin_config_set_chain(revlin_config* config, const char* shorthand);
REVLIN_API revlin_status revlin_config_set_family(revlin_config* config, const char* shorthand);
REVLIN_API revlin_status revlin_config_set_seed(revlin_config* config, uint64_t seed);
REVLIN_API revlin_status revlin_config_set_threads(revlin_config* config, unsigned threads);
REVLIN_API revlin_status revlin_config_set_output_dir(revlin_config* config, const char* dir);

/* Effective configuration as JSON (without threads and output); owned by
   the handle. */
REVLIN_API const char* revlin_config_json(const revlin_config* config);

/* --- commands ---------------------------------------------------------- */

/* Limit targets and condition checks for the chain (family optional). */
REVLIN_API revlin_status revlin_oracle(const revlin_config* config, revlin_result** out);
/* Monte Carlo experiment selected by experiment.mode. */
REVLIN_API revlin_status revlin_run(const revlin_config* config, revlin_result** out);
/* Coefficients, weight window and regular-variation diagnostic. */
REVLIN_API revlin_status revlin_coeffs(const revlin_config* config, revlin_result** out);
/* Condition checks only. */
REVLIN_API revlin_status revlin_check(const revlin_config* config, revlin_result** out);

/* --- results ----------------------------------------------------------- */

/* Report document; owned by the handle. */
REVLIN_API const char* revlin_result_json(const revlin_result* result);

/* run: experiment verdict. oracle/check: pass iff every condition passed.
   coeffs: none. */
REVLIN_API revlin_verdict revlin_result_verdict(const revlin_result* result);

/* Named scalar: a statistic or target of the report (e.g. "variance_ratio",
   "sigma2", "bn2"). REVLIN_ERROR_INVALID_ARGUMENT if absent. */
REVLIN_API revlin_status revlin_result_scalar(const revlin_result* result, const char* name,
                                              double* out);

/* CSV attachment "samples", "weights" or "coefficients"; NULL if absent. */
REVLIN_API const char* revlin_result_csv(const revlin_result* result, const char* name);

/* Writes the report and every CSV attachment into dir (created if needed),
   named by the output section or "<attachment>.csv". dir may be NULL to use
   output.dir of the configuration. */
REVLIN_API revlin_status revlin_result_write(const revlin_result* result, const char* dir);

REVLIN_API void revlin_result_free(revlin_result* result);

#ifdef __cplusplus
}
#endif

#endif /* REVLIN_REVLIN_H */
