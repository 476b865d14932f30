/* recml — recursive marginal likelihood estimation.
 *
 * C interface to the estimation core: opaque experiment handles driven by
 * a flat `key = value` configuration, results retrieved as JSON strings.
 * Every entry point returns a recml_status; 0 is success and the nonzero
 * codes match the CLI exit codes.
 */
#ifndef RECML_H
#define RECML_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct recml_experiment recml_experiment;

typedef enum recml_status {
    RECML_OK = 0,
    RECML_ERR_CONFIG = 2,        /* invalid configuration or input file */
    RECML_ERR_STALL = 3,         /* sampler stall (nested-sampling shell search) */
    RECML_ERR_CONNECTIVITY = 4,  /* rung overlap graph not strongly connected */
    RECML_ERR_NONCONVERGENCE = 5,/* fixed point or optimizer did not converge */
    RECML_ERR_INTERNAL = 10
} recml_status;

const char* recml_version(void);

/* Creates an experiment from configuration text (or a file). On success
 * *out owns the handle; destroy with recml_experiment_destroy. */
recml_status recml_experiment_create(const char* config_text, recml_experiment** out);
recml_status recml_experiment_create_from_file(const char* path, recml_experiment** out);
void recml_experiment_destroy(recml_experiment* exp);

/* Overrides one configuration entry (e.g. "seed", "out"). */
recml_status recml_experiment_set(recml_experiment* exp, const char* key, const char* value);

/* Runs. Each stores a JSON result retrievable via recml_last_result_json
 * and, when the config carries an `out` directory, writes report/trace
 * files there. */
recml_status recml_run_oracle(recml_experiment* exp);
recml_status recml_run_estimate(recml_experiment* exp);
recml_status recml_run_replicates(recml_experiment* exp, size_t replicates);
recml_status recml_run_nested(recml_experiment* exp);
recml_status recml_run_galaxy(recml_experiment* exp);
recml_status recml_run_reweight(recml_experiment* exp);
recml_status recml_run_csweep(recml_experiment* exp, const double* c_values, size_t n_c, size_t replicates);

/* Last JSON result (run functions) and last error message. The returned
 * pointers stay valid until the next call on the same handle. */
const char* recml_last_result_json(const recml_experiment* exp);
const char* recml_last_error(const recml_experiment* exp);

#ifdef __cplusplus
}
#endif

#endif /* RECML_H */
