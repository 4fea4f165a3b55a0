/* tracesynth: RL-driven synthesis of high-coverage syscall traces for
 * OS-fuzzer seeding. C interface of the shared library.
 *
 * Conventions:
 *   - Every fallible function returns ts_status; TS_OK is 0.
 *   - On failure, ts_last_error() returns a human-readable message. The
 *     message is thread-local and valid until the next failing call on the
 *     same thread.
 *   - Objects returned through ts_*_new/load/... out-parameters are owned by
 *     the caller and released with the matching ts_*_free. Out-parameters are
 *     untouched on failure.
 */
#ifndef TRACESYNTH_H
#define TRACESYNTH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TS_API __declspec(dllexport)
#else
#define TS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ts_status {
    TS_OK = 0,
    TS_ERR_IO = 1,
    TS_ERR_PARSE = 2,
    TS_ERR_VALIDATION = 3,
    TS_ERR_INVALID_ARGUMENT = 4,
    TS_ERR_PROTOCOL = 5,
    TS_ERR_CONNECTION = 6,
    TS_ERR_TIMEOUT = 7,
    TS_ERR_REMOTE = 8,
    TS_ERR_DIVERGED = 9,
    TS_ERR_LIMIT = 10,
    TS_ERR_INTERNAL = 11
} ts_status;

typedef struct ts_universe ts_universe;
typedef struct ts_corpus ts_corpus;
typedef struct ts_server ts_server;

TS_API const char* ts_version(void);
TS_API const char* ts_last_error(void);

/* ---- syscall universe ---------------------------------------------- */

TS_API ts_status ts_universe_load(const char* path, ts_universe** out);
TS_API ts_status ts_universe_generate(uint32_t n, double explicit_density,
                                      double implicit_density, uint64_t seed, ts_universe** out);
TS_API ts_status ts_universe_save(const ts_universe* u, const char* path);
TS_API uint32_t ts_universe_size(const ts_universe* u);
TS_API uint64_t ts_universe_explicit_count(const ts_universe* u);
TS_API uint64_t ts_universe_implicit_count(const ts_universe* u);
/* Writes the 16-hex-digit fingerprint plus NUL; buf must hold >= 17 bytes. */
TS_API ts_status ts_universe_fingerprint(const ts_universe* u, char* buf, size_t buf_len);
TS_API void ts_universe_free(ts_universe* u);

/* ---- coverage oracles ---------------------------------------------- */

typedef struct ts_oracle_config {
    uint64_t explicit_bonus;
    uint64_t implicit_bonus;
    uint64_t saturation_cap;
    uint64_t noise_amplitude;
    uint64_t rng_seed;
} ts_oracle_config;

TS_API void ts_oracle_config_default(ts_oracle_config* cfg);

/* per_call must hold trace_len entries; trace holds syscall ids. */
TS_API ts_status ts_eval_sim(const ts_universe* u, const ts_oracle_config* cfg,
                             const uint32_t* trace, uint32_t trace_len, uint64_t* per_call);
TS_API ts_status ts_eval_remote(const ts_universe* u, const char* endpoint, int timeout_ms,
                                const uint32_t* trace, uint32_t trace_len, uint64_t* per_call);

/* ---- training ------------------------------------------------------ */

typedef struct ts_train_options {
    /* agent */
    double gamma;
    double lr;
    double eps_start;
    double eps_end;
    uint64_t eps_decay_steps;
    uint32_t replay_capacity;
    uint32_t batch_size;
    uint32_t target_sync_interval;
    uint32_t hidden_width;
    /* episodes */
    double t1;
    double t2;
    uint32_t max_steps_per_episode;
    uint32_t episodes;
    int revert_on_decrease;
    /* run */
    uint32_t trace_len;
    uint64_t seed;
    uint32_t export_count;
} ts_train_options;

TS_API void ts_train_options_default(ts_train_options* opts);

typedef struct ts_train_summary {
    uint32_t episodes_run;
    uint32_t archived;
    uint64_t total_steps;
    uint64_t train_updates;
    double wall_seconds;
    double final_loss;
    uint64_t best_total;
} ts_train_summary;

/* Writes archive.corpus, loss.csv, episodes.csv, summary.json (and
 * export.corpus when export_count > 0) into out_dir, which must exist. */
TS_API ts_status ts_train_sim(const ts_universe* u, const ts_oracle_config* cfg,
                              const ts_train_options* opts, const char* out_dir,
                              ts_train_summary* summary);
TS_API ts_status ts_train_remote(const ts_universe* u, const char* endpoint, int timeout_ms,
                                 const ts_train_options* opts, const char* out_dir,
                                 ts_train_summary* summary);

/* ---- corpora and seed analysis -------------------------------------- */

TS_API ts_status ts_corpus_read(const char* path, const ts_universe* u, ts_corpus** out);
TS_API uint32_t ts_corpus_len(const ts_corpus* c);
TS_API uint32_t ts_corpus_trace_len(const ts_corpus* c);
/* Copies trace `index` into out (ts_corpus_trace_len entries). */
TS_API ts_status ts_corpus_trace(const ts_corpus* c, uint32_t index, uint32_t* out);
TS_API void ts_corpus_free(ts_corpus* c);

typedef struct ts_seed_report {
    uint32_t trace_count;
    uint32_t unique_syscalls;
    uint32_t explicit_satisfied;
    uint32_t implicit_satisfied;
} ts_seed_report;

TS_API ts_status ts_analyze(const ts_corpus* c, const ts_universe* u, ts_seed_report* report);
/* hist must hold ts_universe_size(u) entries. */
TS_API ts_status ts_usage_histogram(const ts_corpus* c, const ts_universe* u, uint32_t* hist);
/* CSV (syscall,traces) of the usage histogram; free with ts_string_free. */
TS_API ts_status ts_histogram_csv(const ts_corpus* c, const ts_universe* u, char** out);

typedef struct ts_agreement {
    uint64_t equivalent_pairs;
    uint32_t matched_in_a;
    uint32_t matched_in_b;
    double pct_a;
    double pct_b;
} ts_agreement;

TS_API ts_status ts_agreement_compute(const ts_corpus* a, const ts_corpus* b, ts_agreement* out);

/* Renders reports side by side; csv nonzero selects CSV over the aligned
 * text table. Free the string with ts_string_free. */
TS_API ts_status ts_comparison_render(const ts_seed_report* reports, const char* const* labels,
                                      uint32_t count, int csv, char** out);
TS_API void ts_string_free(char* s);

/* ---- length sweep ---------------------------------------------------- */

/* Writes a length,traces,calls,total_coverage CSV covering [min_len, max_len]
 * with floor(budget/length) random traces per length. */
TS_API ts_status ts_bench_length(const ts_universe* u, const ts_oracle_config* cfg,
                                 uint32_t min_len, uint32_t max_len, uint64_t budget,
                                 uint64_t seed, const char* csv_path);

/* ---- mock fuzzer server ---------------------------------------------- */

/* Binds and starts serving immediately; port 0 picks an ephemeral port. */
TS_API ts_status ts_server_start(const ts_universe* u, const ts_oracle_config* cfg,
                                 const char* bind_host, uint16_t port, ts_server** out);
TS_API uint16_t ts_server_port(const ts_server* s);
TS_API void ts_server_stop(ts_server* s);
TS_API void ts_server_free(ts_server* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TRACESYNTH_H */
