#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "audio_io.hpp"
#include "errors.hpp"
#include "metrics.hpp"

namespace bba::harness {

namespace {

using nlohmann::json;

namespace fs = std::filesystem;

std::string resolve_relative(const std::string& base_dir, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (fs::path(base_dir) / p).string();
}

std::string zero_padded(std::size_t index) {
    std::ostringstream out;
    out.width(3);
    out.fill('0');
    out << index;
    return out.str();
}

json outcome_to_json(const SampleOutcome& s) {
    json j;
    j["index"] = s.index;
    j["wav_path"] = s.wav_path;
    j["target"] = s.target;
    j["seed"] = s.seed;
    if (!s.error.empty()) {
        j["error"] = s.error;
        return j;
    }
    j["transcript"] = s.transcript;
    j["original_transcript"] = s.original_transcript;
    j["success"] = s.success;
    j["iterations_used"] = s.iterations_used;
    j["levenshtein"] = s.levenshtein;
    if (s.has_similarity) {
        j["target_similarity"] = s.target_similarity;
    } else {
        j["target_similarity"] = nullptr;
    }
    j["audio_correlation"] = s.audio_correlation;
    j["adversarial_wav"] = "adversarial_" + zero_padded(s.index) + ".wav";
    return j;
}

}  // namespace

CorpusManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw_error(ErrorCode::Io, "cannot open manifest: " + path);
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw_error(ErrorCode::Format, std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array()) {
        throw_error(ErrorCode::Format, "manifest must contain an 'entries' array");
    }

    const std::string base_dir = fs::path(path).parent_path().string();
    CorpusManifest manifest;
    for (const json& e : j["entries"]) {
        if (!e.is_object() || !e.contains("wav_path") || !e["wav_path"].is_string()) {
            throw_error(ErrorCode::Format, "each manifest entry needs a 'wav_path' string");
        }
        ManifestEntry entry;
        entry.wav_path = resolve_relative(base_dir, e["wav_path"].get<std::string>());
        if (e.contains("fixed_target")) {
            if (!e["fixed_target"].is_string()) {
                throw_error(ErrorCode::Format, "'fixed_target' must be a string");
            }
            entry.fixed_target = e["fixed_target"].get<std::string>();
        }
        manifest.entries.push_back(std::move(entry));
    }
    if (manifest.entries.empty()) {
        throw_error(ErrorCode::InvalidArgument, "manifest has no entries");
    }
    if (j.contains("wordlist_path")) {
        if (!j["wordlist_path"].is_string()) {
            throw_error(ErrorCode::Format, "'wordlist_path' must be a string");
        }
        manifest.wordlist_path = resolve_relative(base_dir, j["wordlist_path"].get<std::string>());
    }

    const bool needs_wordlist = std::any_of(
        manifest.entries.begin(), manifest.entries.end(),
        [](const ManifestEntry& e) { return !e.fixed_target.has_value(); });
    if (needs_wordlist && manifest.wordlist_path.empty()) {
        throw_error(ErrorCode::InvalidArgument,
                    "manifest needs a wordlist_path for entries without fixed targets");
    }
    return manifest;
}

std::vector<std::string> load_wordlist(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw_error(ErrorCode::Io, "cannot open wordlist: " + path);
    }
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        for (char c : line) {
            if (c < 'a' || c > 'z') {
                throw_error(ErrorCode::InvalidArgument,
                            "wordlist entry '" + line + "' has characters outside a-z");
            }
        }
        words.push_back(line);
    }
    return words;
}

ctc::Phrase generate_target(const std::vector<std::string>& wordlist, Rng& rng) {
    std::vector<std::string> distinct = wordlist;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) {
        throw_error(ErrorCode::InvalidArgument,
                    "wordlist needs at least 2 distinct words, got " +
                        std::to_string(distinct.size()));
    }
    const std::size_t first = static_cast<std::size_t>(rng.below(distinct.size()));
    std::size_t second = static_cast<std::size_t>(rng.below(distinct.size() - 1));
    if (second >= first) ++second;
    return ctc::Phrase(distinct[first] + " " + distinct[second]);
}

std::uint64_t entry_seed(std::uint64_t run_seed, std::size_t entry_index) {
    return mix_seed(run_seed, 3, entry_index);
}

CorpusReport run_corpus(const CorpusManifest& manifest, const attack::AttackConfig& config,
                        const Oracle& oracle, std::size_t parallelism) {
    if (manifest.entries.empty()) {
        throw_error(ErrorCode::InvalidArgument, "manifest has no entries");
    }
    attack::validate_config(config);

    std::vector<std::string> wordlist;
    const bool needs_wordlist = std::any_of(
        manifest.entries.begin(), manifest.entries.end(),
        [](const ManifestEntry& e) { return !e.fixed_target.has_value(); });
    if (needs_wordlist) {
        wordlist = load_wordlist(manifest.wordlist_path);
    }

    const std::size_t n = manifest.entries.size();
    std::vector<SampleOutcome> outcomes(n);

    auto run_entry = [&](std::size_t i) {
        const ManifestEntry& entry = manifest.entries[i];
        SampleOutcome& out = outcomes[i];
        out.index = i;
        out.wav_path = entry.wav_path;
        out.seed = entry_seed(config.seed, i);
        try {
            const audio::AudioBuffer x = audio::read_wav(entry.wav_path);

            ctc::Phrase target;
            if (entry.fixed_target) {
                target = ctc::Phrase(*entry.fixed_target);
            } else {
                Rng target_rng(mix_seed(out.seed, 4));
                target = generate_target(wordlist, target_rng);
            }
            out.target = target.text();

            const ctc::Phrase original = oracle.score(x, target).transcript;

            attack::AttackConfig entry_config = config;
            entry_config.seed = out.seed;
            const attack::AttackResult result =
                attack::run_attack(x, target, oracle, entry_config);

            out.transcript = result.transcript.text();
            out.original_transcript = original.text();
            out.success = result.success;
            out.iterations_used = result.iterations_used;
            out.levenshtein = result.levenshtein;
            out.audio_correlation = result.correlation;
            out.adversarial = result.adversarial;
            if (!original.empty()) {
                out.target_similarity =
                    metrics::target_similarity(result.transcript, target, original);
                out.has_similarity = true;
            }
        } catch (const Error& e) {
            out.error = e.what();
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(parallelism, 1, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) run_entry(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= n) return;
                    run_entry(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    CorpusReport report;
    report.per_sample = std::move(outcomes);

    std::size_t successes = 0;
    std::size_t with_similarity = 0;
    std::size_t completed = 0;
    double similarity_sum = 0.0;
    double correlation_sum = 0.0;
    for (const SampleOutcome& s : report.per_sample) {
        if (!s.error.empty()) continue;
        ++completed;
        if (s.success) {
            ++successes;
            ++report.generations_histogram[s.iterations_used];
        }
        ++report.levenshtein_histogram[s.levenshtein];
        if (s.has_similarity) {
            ++with_similarity;
            similarity_sum += s.target_similarity;
        }
        correlation_sum += s.audio_correlation;
    }
    report.exact_success_rate = static_cast<double>(successes) / static_cast<double>(n);
    report.mean_target_similarity =
        with_similarity > 0 ? similarity_sum / static_cast<double>(with_similarity) : 0.0;
    report.mean_audio_correlation =
        completed > 0 ? correlation_sum / static_cast<double>(completed) : 0.0;
    return report;
}

std::string report_to_json(const CorpusReport& report) {
    json j;
    j["exact_success_rate"] = report.exact_success_rate;
    j["mean_target_similarity"] = report.mean_target_similarity;
    j["mean_audio_correlation"] = report.mean_audio_correlation;

    json lev = json::object();
    for (const auto& [distance, count] : report.levenshtein_histogram) {
        lev[std::to_string(distance)] = count;
    }
    j["levenshtein_histogram"] = lev;

    json gens = json::object();
    for (const auto& [generation, count] : report.generations_histogram) {
        gens[std::to_string(generation)] = count;
    }
    j["generations_histogram"] = gens;

    json samples = json::array();
    for (const SampleOutcome& s : report.per_sample) {
        samples.push_back(outcome_to_json(s));
    }
    j["per_sample"] = samples;
    return j.dump(2);
}

void emit_report(const CorpusReport& report, const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw_error(ErrorCode::Io, "cannot create output directory: " + out_dir);
    }

    {
        std::ofstream out(fs::path(out_dir) / "report.json");
        if (!out) {
            throw_error(ErrorCode::Io, "cannot write report.json under " + out_dir);
        }
        out << report_to_json(report) << "\n";
    }

    {
        std::ofstream out(fs::path(out_dir) / "histogram.csv");
        if (!out) {
            throw_error(ErrorCode::Io, "cannot write histogram.csv under " + out_dir);
        }
        out << "distance,count\n";
        for (const auto& [distance, count] : report.levenshtein_histogram) {
            out << distance << "," << count << "\n";
        }
    }

    for (const SampleOutcome& s : report.per_sample) {
        if (!s.error.empty()) continue;
        const std::string tag = zero_padded(s.index);
        audio::write_wav(s.adversarial, (fs::path(out_dir) / ("adversarial_" + tag + ".wav")).string());

        const audio::AudioBuffer original = audio::read_wav(s.wav_path);
        std::ofstream overlay(fs::path(out_dir) / ("overlay_" + tag + ".csv"));
        if (!overlay) {
            throw_error(ErrorCode::Io, "cannot write overlay csv under " + out_dir);
        }
        const std::size_t len = std::min(original.size(), s.adversarial.size());
        for (std::size_t i = 0; i < len; ++i) {
            overlay << original.samples[i] << "," << s.adversarial.samples[i] << "\n";
        }
    }
}

std::string attack_result_to_json(const attack::AttackResult& result,
                                  const ctc::Phrase& target) {
    json j;
    j["target"] = target.text();
    j["transcript"] = result.transcript.text();
    j["success"] = result.success;
    j["iterations_used"] = result.iterations_used;
    j["levenshtein"] = result.levenshtein;
    j["correlation"] = result.correlation;

    json trace = json::array();
    for (const attack::GenerationRecord& r : result.trace) {
        json rec;
        rec["generation"] = r.generation;
        rec["phase"] = r.phase == attack::Phase::Genetic ? "genetic" : "gradient";
        rec["edit_distance"] = r.edit_distance;
        rec["population_best_score"] = r.population_best_score;
        rec["best_score"] = r.best_score;
        rec["mutation_p"] = r.mutation_p;
        trace.push_back(std::move(rec));
    }
    j["trace"] = trace;
    return j.dump(2);
}

void emit_attack_result(const attack::AttackResult& result, const ctc::Phrase& target,
                        const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw_error(ErrorCode::Io, "cannot create output directory: " + out_dir);
    }
    audio::write_wav(result.adversarial, (fs::path(out_dir) / "adversarial.wav").string());
    std::ofstream out(fs::path(out_dir) / "result.json");
    if (!out) {
        throw_error(ErrorCode::Io, "cannot write result.json under " + out_dir);
    }
    out << attack_result_to_json(result, target) << "\n";
}

}  // namespace bba::harness
