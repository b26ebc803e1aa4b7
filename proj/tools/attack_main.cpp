// attack CLI: single-sample and corpus attacks against a toy or HTTP oracle.
//
//   attack single --in clip.wav --target "hello world" --out results/
//   attack corpus --manifest corpus.json --config cfg.json --out results/ --parallelism 4
//
// Exits 0 when the run completes (whether or not the attack reached the
// target) and nonzero on operational errors.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "bba.h"

namespace {

struct OracleOptions {
    std::string spec = "toy";
    std::uint64_t toy_seed = 0;
    int timeout_ms = 10000;
    int retries = 2;
};

void add_oracle_options(CLI::App* cmd, OracleOptions& opts) {
    cmd->add_option("--oracle", opts.spec,
                    "Oracle to attack: 'toy' or an http(s):// endpoint URL")
        ->capture_default_str();
    cmd->add_option("--oracle-seed", opts.toy_seed, "Seed of the toy oracle's weights")
        ->capture_default_str();
    cmd->add_option("--timeout-ms", opts.timeout_ms, "HTTP request timeout")
        ->capture_default_str();
    cmd->add_option("--retries", opts.retries, "HTTP retry count for transient failures")
        ->capture_default_str();
}

bba_oracle* open_oracle(const OracleOptions& opts) {
    bba_oracle* oracle = nullptr;
    bba_status st;
    if (opts.spec == "toy") {
        st = bba_oracle_toy(opts.toy_seed, &oracle);
    } else if (opts.spec.rfind("http:", 0) == 0 || opts.spec.rfind("https:", 0) == 0) {
        st = bba_oracle_http(opts.spec.c_str(), opts.timeout_ms, opts.retries, &oracle);
    } else {
        std::fprintf(stderr, "error: --oracle must be 'toy' or an http(s) URL, got '%s'\n",
                     opts.spec.c_str());
        return nullptr;
    }
    if (st != BBA_OK) {
        std::fprintf(stderr, "error: cannot open oracle: %s\n", bba_last_error());
        return nullptr;
    }
    return oracle;
}

bba_config* open_config(const std::string& path, bool has_seed, std::uint64_t seed) {
    bba_config* config = nullptr;
    const bba_status st =
        path.empty() ? bba_config_default(&config) : bba_config_load(path.c_str(), &config);
    if (st != BBA_OK) {
        std::fprintf(stderr, "error: cannot load config: %s\n", bba_last_error());
        return nullptr;
    }
    if (has_seed) {
        bba_config_set_seed(config, seed);
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Targeted adversarial audio attacks against a black-box "
                 "speech-to-text oracle"};
    app.require_subcommand(1);

    // single
    auto* single = app.add_subcommand("single", "Attack one wav file");
    std::string in_path, target, config_path, out_dir;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    OracleOptions single_oracle;
    single->add_option("--in", in_path, "Input wav (16 kHz mono 16-bit PCM)")->required();
    single->add_option("--target", target, "Target phrase (a-z and spaces)")->required();
    single->add_option("--config", config_path, "Attack config JSON");
    single->add_option("--out", out_dir, "Output directory")->required();
    auto* seed_opt = single->add_option("--seed", seed, "Override the config seed");
    single->add_option("--workers", workers,
                       "Oracle query threads (0 = hardware concurrency)");
    add_oracle_options(single, single_oracle);

    // corpus
    auto* corpus = app.add_subcommand("corpus", "Attack every entry of a corpus manifest");
    std::string manifest_path, corpus_config_path, corpus_out_dir;
    std::size_t parallelism = 1;
    std::uint64_t corpus_seed = 0;
    OracleOptions corpus_oracle;
    corpus->add_option("--manifest", manifest_path, "Corpus manifest JSON")->required();
    corpus->add_option("--config", corpus_config_path, "Attack config JSON");
    corpus->add_option("--out", corpus_out_dir, "Output directory")->required();
    corpus->add_option("--parallelism", parallelism, "Entries attacked concurrently")
        ->capture_default_str();
    auto* corpus_seed_opt =
        corpus->add_option("--seed", corpus_seed, "Override the config seed");
    add_oracle_options(corpus, corpus_oracle);

    CLI11_PARSE(app, argc, argv);

    if (single->parsed()) {
        bba_buffer* input = nullptr;
        if (bba_buffer_read_wav(in_path.c_str(), &input) != BBA_OK) {
            std::fprintf(stderr, "error: %s\n", bba_last_error());
            return 1;
        }
        std::unique_ptr<bba_buffer, decltype(&bba_buffer_free)> input_guard(input,
                                                                            bba_buffer_free);
        bba_config* config = open_config(config_path, !seed_opt->empty(), seed);
        if (config == nullptr) return 1;
        std::unique_ptr<bba_config, decltype(&bba_config_free)> config_guard(config,
                                                                             bba_config_free);
        bba_oracle* oracle = open_oracle(single_oracle);
        if (oracle == nullptr) return 1;
        std::unique_ptr<bba_oracle, decltype(&bba_oracle_free)> oracle_guard(oracle,
                                                                             bba_oracle_free);

        bba_result* result = nullptr;
        if (bba_attack_run(input, target.c_str(), oracle, config, workers, &result) !=
            BBA_OK) {
            std::fprintf(stderr, "error: attack failed: %s\n", bba_last_error());
            return 1;
        }
        std::unique_ptr<bba_result, decltype(&bba_result_free)> result_guard(result,
                                                                             bba_result_free);
        if (bba_result_emit(result, out_dir.c_str()) != BBA_OK) {
            std::fprintf(stderr, "error: cannot write results: %s\n", bba_last_error());
            return 1;
        }
        std::printf("%s after %llu generations: \"%s\" (levenshtein %llu, correlation %.4f)\n",
                    bba_result_success(result) ? "success" : "no exact decode",
                    static_cast<unsigned long long>(bba_result_iterations(result)),
                    bba_result_transcript(result),
                    static_cast<unsigned long long>(bba_result_levenshtein(result)),
                    bba_result_correlation(result));
        std::printf("wrote %s/adversarial.wav and %s/result.json\n", out_dir.c_str(),
                    out_dir.c_str());
        return 0;
    }

    // corpus
    bba_config* config = open_config(corpus_config_path, !corpus_seed_opt->empty(), corpus_seed);
    if (config == nullptr) return 1;
    std::unique_ptr<bba_config, decltype(&bba_config_free)> config_guard(config,
                                                                         bba_config_free);
    bba_oracle* oracle = open_oracle(corpus_oracle);
    if (oracle == nullptr) return 1;
    std::unique_ptr<bba_oracle, decltype(&bba_oracle_free)> oracle_guard(oracle,
                                                                         bba_oracle_free);
    if (bba_corpus_run(manifest_path.c_str(), config, oracle, parallelism,
                       corpus_out_dir.c_str()) != BBA_OK) {
        std::fprintf(stderr, "error: corpus run failed: %s\n", bba_last_error());
        return 1;
    }
    std::printf("wrote corpus report under %s\n", corpus_out_dir.c_str());
    return 0;
}
