#include "bba.h"

#include <cstring>
#include <new>
#include <string>
#include <thread>

#include "attack.hpp"
#include "audio_io.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "http_oracle.hpp"
#include "oracle_server.hpp"
#include "victim.hpp"

struct bba_buffer {
    bba::audio::AudioBuffer buffer;
};

struct bba_config {
    bba::attack::AttackConfig config;
};

struct bba_oracle {
    std::unique_ptr<bba::Oracle> oracle;
};

struct bba_result {
    bba::attack::AttackResult result;
    bba::ctc::Phrase target;
    bba_buffer audio_view;  // aliases result.adversarial for bba_result_audio
};

namespace {

thread_local std::string g_last_error;

bba_status status_from(bba::ErrorCode code) {
    switch (code) {
        case bba::ErrorCode::InvalidArgument: return BBA_ERR_INVALID_ARG;
        case bba::ErrorCode::Io: return BBA_ERR_IO;
        case bba::ErrorCode::Format: return BBA_ERR_FORMAT;
        case bba::ErrorCode::Unsupported: return BBA_ERR_UNSUPPORTED;
        case bba::ErrorCode::Remote: return BBA_ERR_REMOTE;
        case bba::ErrorCode::Protocol: return BBA_ERR_PROTOCOL;
        case bba::ErrorCode::Timeout: return BBA_ERR_TIMEOUT;
        case bba::ErrorCode::Oracle: return BBA_ERR_ORACLE;
        case bba::ErrorCode::Internal: return BBA_ERR_INTERNAL;
    }
    return BBA_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes and the thread-local
// error message.
template <typename Fn>
bba_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return BBA_OK;
    } catch (const bba::Error& e) {
        g_last_error = e.what();
        return status_from(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return BBA_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return BBA_ERR_INTERNAL;
    }
}

bba_status invalid(const char* message) {
    g_last_error = message;
    return BBA_ERR_INVALID_ARG;
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(::operator new(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* bba_status_name(bba_status status) {
    switch (status) {
        case BBA_OK: return "ok";
        case BBA_ERR_INVALID_ARG: return "invalid_arg";
        case BBA_ERR_IO: return "io";
        case BBA_ERR_FORMAT: return "format";
        case BBA_ERR_UNSUPPORTED: return "unsupported";
        case BBA_ERR_REMOTE: return "remote";
        case BBA_ERR_PROTOCOL: return "protocol";
        case BBA_ERR_TIMEOUT: return "timeout";
        case BBA_ERR_ORACLE: return "oracle";
        case BBA_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* bba_last_error(void) { return g_last_error.c_str(); }

bba_status bba_buffer_from_samples(const double* samples, size_t count, int sample_rate,
                                   bba_buffer** out) {
    if (samples == nullptr || out == nullptr) return invalid("null argument");
    return guarded([&] {
        auto handle = std::make_unique<bba_buffer>();
        handle->buffer.samples.assign(samples, samples + count);
        handle->buffer.sample_rate = sample_rate;
        *out = handle.release();
    });
}

bba_status bba_buffer_read_wav(const char* path, bba_buffer** out) {
    if (path == nullptr || out == nullptr) return invalid("null argument");
    return guarded([&] {
        auto handle = std::make_unique<bba_buffer>();
        handle->buffer = bba::audio::read_wav(path);
        *out = handle.release();
    });
}

bba_status bba_buffer_write_wav(const bba_buffer* buffer, const char* path) {
    if (buffer == nullptr || path == nullptr) return invalid("null argument");
    return guarded([&] { bba::audio::write_wav(buffer->buffer, path); });
}

size_t bba_buffer_length(const bba_buffer* buffer) {
    return buffer == nullptr ? 0 : buffer->buffer.size();
}

int bba_buffer_sample_rate(const bba_buffer* buffer) {
    return buffer == nullptr ? 0 : buffer->buffer.sample_rate;
}

const double* bba_buffer_samples(const bba_buffer* buffer) {
    return buffer == nullptr ? nullptr : buffer->buffer.samples.data();
}

void bba_buffer_free(bba_buffer* buffer) { delete buffer; }

bba_status bba_config_default(bba_config** out) {
    if (out == nullptr) return invalid("null argument");
    return guarded([&] { *out = new bba_config(); });
}

bba_status bba_config_load(const char* path, bba_config** out) {
    if (path == nullptr || out == nullptr) return invalid("null argument");
    return guarded([&] {
        auto handle = std::make_unique<bba_config>();
        handle->config = bba::config::load_config(path);
        *out = handle.release();
    });
}

bba_status bba_config_set_seed(bba_config* config, uint64_t seed) {
    if (config == nullptr) return invalid("null argument");
    config->config.seed = seed;
    return BBA_OK;
}

bba_status bba_config_to_json(const bba_config* config, char** json_out) {
    if (config == nullptr || json_out == nullptr) return invalid("null argument");
    return guarded([&] { *json_out = copy_string(bba::config::config_to_json(config->config)); });
}

void bba_config_free(bba_config* config) { delete config; }

bba_status bba_oracle_toy(uint64_t seed, bba_oracle** out) {
    if (out == nullptr) return invalid("null argument");
    return guarded([&] {
        bba::victim::ToyVictimParams params;
        params.seed = seed;
        auto handle = std::make_unique<bba_oracle>();
        handle->oracle = std::make_unique<bba::victim::ToyOracle>(params);
        *out = handle.release();
    });
}

bba_status bba_oracle_http(const char* endpoint, int timeout_ms, int retries,
                           bba_oracle** out) {
    if (endpoint == nullptr || out == nullptr) return invalid("null argument");
    return guarded([&] {
        auto handle = std::make_unique<bba_oracle>();
        handle->oracle = std::make_unique<bba::victim::HttpOracle>(
            endpoint, std::chrono::milliseconds(timeout_ms), retries);
        *out = handle.release();
    });
}

bba_status bba_oracle_score(const bba_oracle* oracle, const bba_buffer* audio,
                            const char* target, double* loss_out, char** transcript_out) {
    if (oracle == nullptr || audio == nullptr || target == nullptr || loss_out == nullptr ||
        transcript_out == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        const bba::OracleResponse r =
            oracle->oracle->score(audio->buffer, bba::ctc::Phrase(target));
        *loss_out = r.loss;
        *transcript_out = copy_string(r.transcript.text());
    });
}

void bba_oracle_free(bba_oracle* oracle) { delete oracle; }

bba_status bba_attack_run(const bba_buffer* input, const char* target,
                          const bba_oracle* oracle, const bba_config* config,
                          size_t workers, bba_result** out) {
    if (input == nullptr || target == nullptr || oracle == nullptr || config == nullptr ||
        out == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        if (workers == 0) {
            workers = std::max(1u, std::thread::hardware_concurrency());
        }
        auto handle = std::make_unique<bba_result>();
        handle->target = bba::ctc::Phrase(target);
        handle->result = bba::attack::run_attack(input->buffer, handle->target,
                                                 *oracle->oracle, config->config, workers);
        handle->audio_view.buffer = handle->result.adversarial;
        *out = handle.release();
    });
}

const bba_buffer* bba_result_audio(const bba_result* result) {
    return result == nullptr ? nullptr : &result->audio_view;
}

const char* bba_result_transcript(const bba_result* result) {
    return result == nullptr ? "" : result->result.transcript.text().c_str();
}

int bba_result_success(const bba_result* result) {
    return result != nullptr && result->result.success ? 1 : 0;
}

uint64_t bba_result_iterations(const bba_result* result) {
    return result == nullptr ? 0 : result->result.iterations_used;
}

double bba_result_correlation(const bba_result* result) {
    return result == nullptr ? 0.0 : result->result.correlation;
}

uint64_t bba_result_levenshtein(const bba_result* result) {
    return result == nullptr ? 0 : result->result.levenshtein;
}

bba_status bba_result_to_json(const bba_result* result, char** json_out) {
    if (result == nullptr || json_out == nullptr) return invalid("null argument");
    return guarded([&] {
        *json_out =
            copy_string(bba::harness::attack_result_to_json(result->result, result->target));
    });
}

void bba_result_free(bba_result* result) { delete result; }

bba_status bba_result_emit(const bba_result* result, const char* out_dir) {
    if (result == nullptr || out_dir == nullptr) return invalid("null argument");
    return guarded(
        [&] { bba::harness::emit_attack_result(result->result, result->target, out_dir); });
}

bba_status bba_corpus_run(const char* manifest_path, const bba_config* config,
                          const bba_oracle* oracle, size_t parallelism,
                          const char* out_dir) {
    if (manifest_path == nullptr || config == nullptr || oracle == nullptr ||
        out_dir == nullptr) {
        return invalid("null argument");
    }
    return guarded([&] {
        const bba::harness::CorpusManifest manifest =
            bba::harness::load_manifest(manifest_path);
        const bba::harness::CorpusReport report = bba::harness::run_corpus(
            manifest, config->config, *oracle->oracle, parallelism == 0 ? 1 : parallelism);
        bba::harness::emit_report(report, out_dir);
    });
}

bba_status bba_oracle_serve(uint64_t seed, const char* host, int port) {
    if (host == nullptr) return invalid("null argument");
    return guarded([&] {
        bba::victim::ToyVictimParams params;
        params.seed = seed;
        bba::victim::OracleServer server(params);
        server.serve(host, port);
    });
}

void bba_string_free(char* s) { ::operator delete(s); }

}  // extern "C"
