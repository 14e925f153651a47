/*
 * fdtwrc — joint relay-user beamforming benchmark for the multi-antenna
 * full-duplex two-way relay channel.
 *
 * C interface over the C++ core: opaque handles, integer status codes,
 * error text through caller-provided buffers. All functions are
 * thread-compatible; distinct handles may be used from distinct threads.
 */
#ifndef FDTWRC_H
#define FDTWRC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define FDTWRC_OK 0
#define FDTWRC_ERROR 1        /* runtime failure; see error buffer */
#define FDTWRC_CONFIG_ERROR 2 /* invalid spec, overrides, or arguments */

typedef struct fdtwrc_spec fdtwrc_spec;
typedef struct fdtwrc_table fdtwrc_table;

const char* fdtwrc_version(void);

/* --- experiment specification ------------------------------------------- */

/* Parses a flat key-value JSON document; unknown keys are rejected. */
int fdtwrc_spec_parse(const char* json_text, fdtwrc_spec** out, char* err, size_t err_len);
int fdtwrc_spec_load(const char* path, fdtwrc_spec** out, char* err, size_t err_len);
void fdtwrc_spec_free(fdtwrc_spec* spec);

void fdtwrc_spec_set_seed(fdtwrc_spec* spec, uint64_t seed);
int fdtwrc_spec_set_runs(fdtwrc_spec* spec, int n_runs, char* err, size_t err_len);
/* Comma-separated scheme names, e.g. "ProposedFD,ZfFD,IdealFD". */
int fdtwrc_spec_set_schemes(fdtwrc_spec* spec, const char* comma_list, char* err, size_t err_len);
void fdtwrc_spec_set_oracle_audit(fdtwrc_spec* spec, int enabled);

/* --- experiments --------------------------------------------------------- */

/* Power-versus-target sweep; one row per (theta, scheme, run). */
int fdtwrc_run_sweep(const fdtwrc_spec* spec, fdtwrc_table** out, char* err, size_t err_len);

/* Mean power versus iteration at a single target. */
int fdtwrc_run_trace(const fdtwrc_spec* spec, fdtwrc_table** out, char* err, size_t err_len);

/* Aggregates a sweep table (linear-domain power averaging). */
int fdtwrc_table_summarize(const fdtwrc_table* table, fdtwrc_table** out, char* err,
                           size_t err_len);

/* --- table access --------------------------------------------------------- */

/* UTF-8 CSV with a header row and LF line endings; owned by the table. */
const char* fdtwrc_table_csv(const fdtwrc_table* table);
int fdtwrc_table_write_csv(const fdtwrc_table* table, const char* path, char* err,
                           size_t err_len);

/* Worst per-scheme fraction of rows with a hard solver failure
 * (sweep tables only; 0.0 otherwise). */
double fdtwrc_table_hard_failure_rate(const fdtwrc_table* table);

/* Number of data rows (excluding the header). */
int fdtwrc_table_rows(const fdtwrc_table* table);

void fdtwrc_table_free(fdtwrc_table* table);

#ifdef __cplusplus
}
#endif

#endif /* FDTWRC_H */
