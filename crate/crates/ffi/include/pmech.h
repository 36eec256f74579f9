#ifndef PMECH_H
#define PMECH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PmechStatus {
  PMECH_STATUS_OK = 0,
  PMECH_STATUS_NULL_POINTER = 1,
  PMECH_STATUS_INVALID_UTF8 = 2,
  // configuration or input rejected
  PMECH_STATUS_INVALID_INPUT = 3,
  // numerics failed or an output could not be written
  PMECH_STATUS_COMPUTATION_FAILED = 4,
  PMECH_STATUS_PANIC = 5,
} PmechStatus;

// Parsed run configuration.
typedef struct PmechConfig PmechConfig;

// Canonical transformation given by polynomial relations.
typedef struct PmechCtSpec PmechCtSpec;

// Verification reports for one or all suites.
typedef struct PmechReport PmechReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread. Valid until the next
// call into the library from the same thread; never null.
const char *pmech_last_error(void);

// Parses configuration text (empty text gives the defaults).
//
// # Safety
// `text` must be a nul-terminated string and `out` a valid pointer.
enum PmechStatus pmech_config_parse(const char *text, struct PmechConfig **out);

// # Safety
// `cfg` must come from `pmech_config_parse` and not be used afterwards. Null is ignored.
void pmech_config_free(struct PmechConfig *cfg);

// Overrides one named tolerance; it must be positive and finite.
//
// # Safety
// `cfg` must be a live handle and `name` a nul-terminated string.
enum PmechStatus pmech_config_set_tolerance(struct PmechConfig *cfg,
                                            const char *name,
                                            double value);

// # Safety
// `cfg` must be a live handle and `out` a valid pointer.
enum PmechStatus pmech_config_seed(const struct PmechConfig *cfg, uint64_t *out);

// Runs one suite, or every suite when `suite` is null.
//
// # Safety
// `cfg` must be a live handle, `suite` null or a nul-terminated string, `out` valid.
enum PmechStatus pmech_verify(const struct PmechConfig *cfg,
                              const char *suite,
                              struct PmechReport **out);

// # Safety
// `r` must come from `pmech_verify` and not be used afterwards. Null is ignored.
void pmech_report_free(struct PmechReport *r);

// 1 when no case failed, else 0.
//
// # Safety
// `r` must be a live handle and `out` a valid pointer.
enum PmechStatus pmech_report_passed(const struct PmechReport *r, int32_t *out);

// Total and failed case counts.
//
// # Safety
// `r` must be a live handle; `total` and `failed` valid pointers.
enum PmechStatus pmech_report_counts(const struct PmechReport *r,
                                     uintptr_t *total,
                                     uintptr_t *failed);

// The reports as a JSON array. Release the string with `pmech_string_free`.
//
// # Safety
// `r` must be a live handle and `out` a valid pointer.
enum PmechStatus pmech_report_json(const struct PmechReport *r, char **out);

// # Safety
// `s` must come from this library and not be used afterwards. Null is ignored.
void pmech_string_free(char *s);

// Runs the configured command, writing its tables into `out_dir`.
// `passed` receives 1 when the command's check passed.
//
// # Safety
// `cfg` must be a live handle, `out_dir` a nul-terminated path, `passed` valid.
enum PmechStatus pmech_run(const struct PmechConfig *cfg, const char *out_dir, int32_t *passed);

// Transformation f_i(q,p) = F_i(Q,P), g_i(q,p) = G_i(Q,P) for i = 1..n; each
// argument holds n polynomials separated by ';'.
//
// # Safety
// All strings must be nul-terminated and `out` valid.
enum PmechStatus pmech_ctspec_parse(uintptr_t n,
                                    const char *f,
                                    const char *big_f,
                                    const char *g,
                                    const char *big_g,
                                    struct PmechCtSpec **out);

// # Safety
// `s` must come from `pmech_ctspec_parse` and not be used afterwards. Null is ignored.
void pmech_ctspec_free(struct PmechCtSpec *s);

// Largest deviation of the Poisson brackets from canonical form.
//
// # Safety
// `s` must be a live handle and `out` a valid pointer.
enum PmechStatus pmech_ctspec_bracket_defect(const struct PmechCtSpec *s, double *out);

// Coulomb level E_n = −2π²/(h²n²).
//
// # Safety
// `out` must be a valid pointer.
enum PmechStatus pmech_coulomb_energy(uint32_t n, double h, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PMECH_H */
