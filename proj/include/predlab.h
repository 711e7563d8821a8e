/* predlab: sequential probability forecasting laboratory.
 *
 * C interface to the experiment runner: list and describe the registered
 * experiments, run one from a config text or file, inspect verdicts, and
 * export the result tables as CSV. Handles are opaque; every call returns a
 * plab_status, with plab_last_error() holding a thread-local message for the
 * most recent failure.
 */
#ifndef PREDLAB_H
#define PREDLAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum plab_status {
  PLAB_OK = 0,
  PLAB_ERR_INVALID_ARGUMENT = 1,
  PLAB_ERR_PARSE = 2,
  PLAB_ERR_UNKNOWN_EXPERIMENT = 3,
  PLAB_ERR_RESOURCE_LIMIT = 4,
  PLAB_ERR_UNDEFINED_CONDITIONAL = 5,
  PLAB_ERR_MIXTURE_ANNIHILATED = 6,
  PLAB_ERR_IO = 7,
  PLAB_ERR_NOT_APPLICABLE = 8,
  PLAB_ERR_INTERNAL = 9
} plab_status;

typedef struct plab_result plab_result; /* opaque experiment result */

const char* plab_version(void);
const char* plab_status_name(plab_status status);
/* Message for the most recent failure on this thread; empty if none. */
const char* plab_last_error(void);

/* --- registry ------------------------------------------------------------ */

int plab_experiment_count(void);
/* id/line/anchor of the index-th experiment; any output may be NULL. */
plab_status plab_experiment_info(int index, char* id, size_t id_size, char* line,
                                 size_t line_size, char* anchor, size_t anchor_size);
/* Commented example configuration for the experiment. */
plab_status plab_experiment_example(const char* id, char* buf, size_t buf_size);

/* --- running ---------------------------------------------------------------
 * Config text uses the flat key = value format; "experiment" selects the id.
 * seed / out / threads may be overridden by passing non-negative values
 * (seed_override < 0 keeps the config value). */
plab_status plab_run(const char* config_text, long long seed_override, int threads_override,
                     plab_result** out);
plab_status plab_run_file(const char* config_path, long long seed_override,
                          int threads_override, plab_result** out);
void plab_result_free(plab_result* result);

/* --- results --------------------------------------------------------------- */

/* 1 when every verdict passed, else 0. */
int plab_result_passed(const plab_result* result);
double plab_result_wall_seconds(const plab_result* result);
int plab_result_verdict_count(const plab_result* result);
plab_status plab_result_verdict(const plab_result* result, int index, char* check_id,
                                size_t check_id_size, double* lhs, double* rhs,
                                double* tolerance, int* pass);
int plab_result_table_count(const plab_result* result);
plab_status plab_result_table_name(const plab_result* result, int index, char* buf,
                                   size_t buf_size);
/* Rendered CSV bytes of one table. Returns the required size (including the
 * terminating NUL) through *needed; copies when buf is large enough. */
plab_status plab_result_table_csv(const plab_result* result, int index, char* buf,
                                  size_t buf_size, size_t* needed);
/* One CSV file per table under dir; files are named <id>__<table>.csv. */
plab_status plab_result_write_csv(const plab_result* result, const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* PREDLAB_H */
