/* C interface to the graph contrastive learning engine. All functions are
 * synchronous; an engine holds a parsed run configuration plus the error and
 * report strings of the most recent call. Engines are not thread-safe; use
 * one per thread. Status codes double as CLI exit codes. */

#ifndef ADNGCL_H
#define ADNGCL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct adngcl_engine adngcl_engine;

enum {
    ADNGCL_OK = 0,
    ADNGCL_ERR_CONFIG = 2,  /* bad config, bad dataset, bad paths */
    ADNGCL_ERR_RUNTIME = 3  /* numerical failure during training */
};

const char* adngcl_version(void);

/* Parses a flat JSON config (see README for keys). Returns NULL on error,
 * in which case errbuf (if given) receives the message. */
adngcl_engine* adngcl_engine_new(const char* config_json, char* errbuf, size_t errcap);
void adngcl_engine_free(adngcl_engine* engine);

/* Message from the last failed call on this engine; empty if none. */
const char* adngcl_engine_last_error(const adngcl_engine* engine);

/* JSON summary of the last successful train/sweep/export call. */
const char* adngcl_engine_last_report(const adngcl_engine* engine);

/* Replaces the configured seed list with a single seed. */
int adngcl_engine_override_seed(adngcl_engine* engine, long long seed);

/* Nonzero: record wall-clock fields as zero so metrics are byte-stable. */
int adngcl_engine_set_deterministic(adngcl_engine* engine, int on);

/* Multi-seed training. out_dir may be NULL or empty: then the configured
 * out_dir is used, or no files are written if that is empty too. */
int adngcl_engine_train(adngcl_engine* engine, const char* out_dir);

/* One multi-seed run per configured ratio triple / budget value. */
int adngcl_engine_sweep_ratio(adngcl_engine* engine, const char* out_dir);
int adngcl_engine_sweep_budget(adngcl_engine* engine, const char* out_dir);

/* Trains the first configured seed, then writes the encoder embeddings of
 * the un-augmented graph as CSV (one node per line). */
int adngcl_engine_export_embeddings(adngcl_engine* engine, const char* csv_path);

/* Converts a metrics JSONL file into plot-ready CSV series under out_dir.
 * Needs no engine. */
int adngcl_plot_metrics(const char* metrics_path, const char* out_dir, char* errbuf,
                        size_t errcap);

#ifdef __cplusplus
}
#endif

#endif /* ADNGCL_H */
