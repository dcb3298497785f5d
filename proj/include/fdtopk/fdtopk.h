/* SPDX-License-Identifier: Apache-2.0 */
#ifndef FDTOPK_FDTOPK_H
#define FDTOPK_FDTOPK_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. */
typedef enum fd_status {
  FD_OK = 0,
  FD_ERR_CONFIG = 1, /* invalid experiment configuration */
  FD_ERR_RUNTIME = 2 /* I/O or execution failure */
} fd_status;

/* Opaque handle around a parsed experiment configuration. */
typedef struct fd_experiment fd_experiment;

/* Parses the key=value config file at `path`. On success stores a handle in
 * *out. On failure returns a nonzero status; fd_last_error_message() holds
 * the line-anchored diagnostics. */
fd_status fd_experiment_open(const char* path, fd_experiment** out);

/* Runs the sweep; writes results.csv and summary.csv into out_dir. jobs > 1
 * runs cells on that many threads. trace != 0 additionally writes one event
 * trace per cell. */
fd_status fd_experiment_run(fd_experiment* exp, const char* out_dir, int jobs, int trace);

void fd_experiment_close(fd_experiment* exp);

/* Message of the most recent failure on this thread; empty string if none. */
const char* fd_last_error_message(void);

/* Closed-form predictors. */
double fd_predict_mfw_basic(double avg_degree, uint64_t covered_peers);
uint64_t fd_predict_mfw_strategy1(uint64_t edges_in_covered_set);
uint64_t fd_predict_bbw(int k, int entry_bytes, uint64_t covered_peers);

/* ceil(k / (1 - p)); returns FD_ERR_CONFIG unless 0 <= p < 1 and k >= 1. */
fd_status fd_inflate_k(int k, double p, int* out);

const char* fd_version(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FDTOPK_FDTOPK_H */
