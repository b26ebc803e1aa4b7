/* bba — black-box adversarial audio attack library.
 *
 * C interface over the C++ core: opaque handles, integer status codes,
 * thread-local error messages. Functions that return a handle through an
 * out-parameter leave it untouched on failure; each handle is released with
 * its matching free function.
 */
#ifndef BBA_H
#define BBA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bba_status {
    BBA_OK = 0,
    BBA_ERR_INVALID_ARG = 1,
    BBA_ERR_IO = 2,
    BBA_ERR_FORMAT = 3,
    BBA_ERR_UNSUPPORTED = 4,
    BBA_ERR_REMOTE = 5,
    BBA_ERR_PROTOCOL = 6,
    BBA_ERR_TIMEOUT = 7,
    BBA_ERR_ORACLE = 8,
    BBA_ERR_INTERNAL = 9
} bba_status;

typedef struct bba_buffer bba_buffer;
typedef struct bba_config bba_config;
typedef struct bba_oracle bba_oracle;
typedef struct bba_result bba_result;

/* Static name for a status code ("ok", "invalid_arg", ...). */
const char* bba_status_name(bba_status status);

/* Message of the last failure on the calling thread; empty string if none. */
const char* bba_last_error(void);

/* ---- audio buffers ---- */

bba_status bba_buffer_from_samples(const double* samples, size_t count, int sample_rate,
                                   bba_buffer** out);
bba_status bba_buffer_read_wav(const char* path, bba_buffer** out);
bba_status bba_buffer_write_wav(const bba_buffer* buffer, const char* path);
size_t bba_buffer_length(const bba_buffer* buffer);
int bba_buffer_sample_rate(const bba_buffer* buffer);
const double* bba_buffer_samples(const bba_buffer* buffer);
void bba_buffer_free(bba_buffer* buffer);

/* ---- attack configuration ---- */

bba_status bba_config_default(bba_config** out);
/* JSON file; keys mirror the config field names. */
bba_status bba_config_load(const char* path, bba_config** out);
bba_status bba_config_set_seed(bba_config* config, uint64_t seed);
/* Serialized JSON; free with bba_string_free. */
bba_status bba_config_to_json(const bba_config* config, char** json_out);
void bba_config_free(bba_config* config);

/* ---- oracles ---- */

bba_status bba_oracle_toy(uint64_t seed, bba_oracle** out);
bba_status bba_oracle_http(const char* endpoint, int timeout_ms, int retries,
                           bba_oracle** out);
/* loss_out is set to +inf when the target is unreachable. transcript_out is
 * malloc'd; free with bba_string_free. */
bba_status bba_oracle_score(const bba_oracle* oracle, const bba_buffer* audio,
                            const char* target, double* loss_out, char** transcript_out);
void bba_oracle_free(bba_oracle* oracle);

/* ---- attacks ---- */

/* workers parallelizes oracle queries; results are identical for any count.
 * workers == 0 uses the hardware thread count. */
bba_status bba_attack_run(const bba_buffer* input, const char* target,
                          const bba_oracle* oracle, const bba_config* config,
                          size_t workers, bba_result** out);

const bba_buffer* bba_result_audio(const bba_result* result);
const char* bba_result_transcript(const bba_result* result);
int bba_result_success(const bba_result* result);
uint64_t bba_result_iterations(const bba_result* result);
double bba_result_correlation(const bba_result* result);
uint64_t bba_result_levenshtein(const bba_result* result);
/* Full result including the per-generation trace; free with bba_string_free. */
bba_status bba_result_to_json(const bba_result* result, char** json_out);
void bba_result_free(bba_result* result);

/* Writes result.json and adversarial.wav under out_dir. */
bba_status bba_result_emit(const bba_result* result, const char* out_dir);

/* ---- corpus runs and serving ---- */

/* Runs every manifest entry and writes report.json, histogram.csv, and
 * per-entry artifacts under out_dir. */
bba_status bba_corpus_run(const char* manifest_path, const bba_config* config,
                          const bba_oracle* oracle, size_t parallelism,
                          const char* out_dir);

/* Serves a toy oracle over HTTP on the calling thread; returns only on
 * failure to bind. */
bba_status bba_oracle_serve(uint64_t seed, const char* host, int port);

void bba_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* BBA_H */
