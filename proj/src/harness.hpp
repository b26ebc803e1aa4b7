#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "attack.hpp"
#include "oracle.hpp"
#include "rng.hpp"

namespace bba::harness {

struct ManifestEntry {
    std::string wav_path;
    std::optional<std::string> fixed_target;
};

struct CorpusManifest {
    std::vector<ManifestEntry> entries;
    std::string wordlist_path;  // may be empty when every entry has a fixed target
};

// JSON manifest: {"entries": [{"wav_path": ..., "fixed_target"?: ...}, ...],
//                 "wordlist_path"?: ...}
// Relative paths are resolved against the manifest's directory.
CorpusManifest load_manifest(const std::string& path);

// One lowercase a-z word per line; blank lines ignored.
std::vector<std::string> load_wordlist(const std::string& path);

// Two distinct words drawn uniformly without replacement, joined by a space.
ctc::Phrase generate_target(const std::vector<std::string>& wordlist, Rng& rng);

// Deterministic per-entry seed; re-running one entry standalone with this
// seed reproduces its corpus result.
std::uint64_t entry_seed(std::uint64_t run_seed, std::size_t entry_index);

struct SampleOutcome {
    std::size_t index = 0;
    std::string wav_path;
    std::string target;
    std::uint64_t seed = 0;
    std::string error;  // empty on success; set when the entry failed to run

    // Valid when error is empty.
    std::string transcript;
    std::string original_transcript;
    bool success = false;
    std::size_t iterations_used = 0;
    std::size_t levenshtein = 0;
    double target_similarity = 0.0;
    bool has_similarity = false;  // false when the original transcript is empty
    double audio_correlation = 0.0;
    audio::AudioBuffer adversarial;
};

struct CorpusReport {
    std::vector<SampleOutcome> per_sample;
    double exact_success_rate = 0.0;
    double mean_target_similarity = 0.0;
    double mean_audio_correlation = 0.0;
    std::map<std::size_t, std::size_t> levenshtein_histogram;  // over completed entries
    std::map<std::size_t, std::size_t> generations_histogram;  // successes by generation count
};

// One attack per manifest entry, up to `parallelism` entries in flight.
// Per-entry failures are recorded in the report; an empty manifest is fatal.
CorpusReport run_corpus(const CorpusManifest& manifest, const attack::AttackConfig& config,
                        const Oracle& oracle, std::size_t parallelism);

// Writes report.json, histogram.csv, and per-entry adversarial_NNN.wav plus
// overlay_NNN.csv (original,adversarial rows) under out_dir.
void emit_report(const CorpusReport& report, const std::string& out_dir);

// Serialization used by emit_report and the single-attack CLI path.
std::string report_to_json(const CorpusReport& report);
std::string attack_result_to_json(const attack::AttackResult& result,
                                  const ctc::Phrase& target);

// Writes result.json and adversarial.wav for one attack.
void emit_attack_result(const attack::AttackResult& result, const ctc::Phrase& target,
                        const std::string& out_dir);

}  // namespace bba::harness
