#include "attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>

#include "metrics.hpp"

namespace bba::attack {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kHighpassCutoffHz = 7000.0;

std::uint64_t child_seed(std::uint64_t run_seed, std::size_t generation, std::size_t member) {
    return mix_seed(mix_seed(run_seed, 1, generation), member);
}

std::uint64_t gradient_seed(std::uint64_t run_seed, std::size_t generation) {
    return mix_seed(mix_seed(run_seed, 2, generation), 0);
}

std::size_t argmax_lowest(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    return best;
}

// Runs fn(i) for i in [0, count) across up to `workers` threads. Exceptions
// are captured per slot and the lowest-index one is rethrown, so failures are
// independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    if (count == 0) return;
    const std::size_t n_threads = std::min(std::max<std::size_t>(workers, 1), count);
    std::vector<std::optional<Error>> failures(count);
    auto guarded = [&](std::size_t i) {
        try {
            fn(i);
            return true;
        } catch (const Error& e) {
            failures[i] = e;
        } catch (const std::exception& e) {
            failures[i] = Error(ErrorCode::Internal, e.what());
        }
        return false;
    };
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            if (!guarded(i)) break;
        }
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < count; i += n_threads) {
                    if (!guarded(i)) return;
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (failures[i]) throw *failures[i];
    }
}

struct ScoredMember {
    audio::AudioBuffer audio;
    double score = kNegInf;
    ctc::Phrase transcript;
};

void score_members(const Oracle& oracle, const ctc::Phrase& target,
                   const std::vector<audio::AudioBuffer>& members, std::size_t workers,
                   std::vector<double>& scores, std::vector<ctc::Phrase>& transcripts) {
    scores.assign(members.size(), kNegInf);
    transcripts.assign(members.size(), ctc::Phrase());
    parallel_for(members.size(), workers, [&](std::size_t i) {
        try {
            const OracleResponse r = oracle.score(members[i], target);
            scores[i] = -r.loss;
            transcripts[i] = r.transcript;
        } catch (const Error& e) {
            throw Error(e.code(),
                        "scoring member " + std::to_string(i) + ": " + e.what());
        }
    });
}

std::vector<std::size_t> elite_indices(std::span<const double> scores, double elite_frac) {
    const std::size_t n = scores.size();
    std::size_t k = static_cast<std::size_t>(
        std::ceil(elite_frac * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(k);
    return order;
}

std::vector<std::size_t> sample_distinct_indices(std::size_t count, std::size_t range,
                                                 Rng& rng) {
    std::vector<std::size_t> pool(range);
    std::iota(pool.begin(), pool.end(), 0);
    const std::size_t m = std::min(count, range);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(range - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

void validate_config(const AttackConfig& config) {
    if (config.population_size < 2) {
        throw_error(ErrorCode::InvalidArgument, "population_size must be >= 2");
    }
    if (!(config.elite_frac > 0.0) || config.elite_frac > 1.0) {
        throw_error(ErrorCode::InvalidArgument, "elite_frac must be in (0, 1]");
    }
    if (config.mutation_p_init < 0.0 || config.mutation_p_init > config.p_max ||
        config.p_max > 1.0) {
        throw_error(ErrorCode::InvalidArgument,
                    "need 0 <= mutation_p_init <= p_max <= 1");
    }
    if (config.alpha < 0.0 || config.alpha >= 1.0) {
        throw_error(ErrorCode::InvalidArgument, "alpha must be in [0, 1)");
    }
    if (!(config.beta > 0.0)) {
        throw_error(ErrorCode::InvalidArgument, "beta must be > 0");
    }
    if (!(config.fd_delta > 0.0)) {
        throw_error(ErrorCode::InvalidArgument, "fd_delta must be > 0");
    }
    if (config.fd_indices == 0) {
        throw_error(ErrorCode::InvalidArgument, "fd_indices must be >= 1");
    }
    if (!std::isfinite(config.fd_step)) {
        throw_error(ErrorCode::InvalidArgument, "fd_step must be finite");
    }
    if (config.noise.sigma < 0.0) {
        throw_error(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
    }
}

Population initialize_population(const audio::AudioBuffer& x, std::size_t size) {
    if (size < 2) {
        throw_error(ErrorCode::InvalidArgument,
                    "population size must be >= 2 (crossover needs two parents)");
    }
    Population pop;
    pop.members.assign(size, x);
    return pop;
}

std::size_t select_parent(std::span<const double> elite_scores, Rng& rng) {
    const std::size_t n = elite_scores.size();
    if (n == 0) {
        throw_error(ErrorCode::InvalidArgument, "select_parent: empty elite");
    }
    if (n == 1) return 0;

    double max_score = kNegInf;
    for (double s : elite_scores) max_score = std::max(max_score, s);
    if (max_score == kNegInf) {
        return static_cast<std::size_t>(rng.below(n));
    }

    std::vector<double> weights(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weights[i] = (elite_scores[i] == kNegInf) ? 0.0 : std::exp(elite_scores[i] - max_score);
        total += weights[i];
    }
    const double u = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return n - 1;
}

audio::AudioBuffer crossover(const audio::AudioBuffer& p1, const audio::AudioBuffer& p2,
                             Rng& rng) {
    if (p1.size() != p2.size()) {
        throw_error(ErrorCode::InvalidArgument, "crossover: parent length mismatch");
    }
    audio::AudioBuffer child = p1;
    for (std::size_t i = 0; i < child.size(); ++i) {
        if (rng.uniform() >= 0.5) child.samples[i] = p2.samples[i];
    }
    return child;
}

audio::AudioBuffer mutate(const audio::AudioBuffer& x, double p, const dsp::NoiseConfig& noise,
                          const dsp::BiquadCoeffs& highpass, Rng& rng) {
    if (p < 0.0 || p > 1.0) {
        throw_error(ErrorCode::InvalidArgument, "mutation probability must be in [0, 1]");
    }
    const std::vector<double> filtered =
        dsp::apply_filter(highpass, dsp::sample_noise(x.size(), noise, rng));
    audio::AudioBuffer out = x;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (rng.uniform() < p) out.samples[i] += filtered[i];
    }
    return out;
}

double momentum_update(double p_old, std::span<const double> new_scores,
                       std::span<const double> old_scores, double alpha, double beta,
                       double p_max) {
    if (new_scores.empty() || old_scores.empty()) {
        throw_error(ErrorCode::InvalidArgument, "momentum_update: empty score list");
    }
    double curr = kNegInf;
    double prev = kNegInf;
    for (double s : new_scores) curr = std::max(curr, s);
    for (double s : old_scores) prev = std::max(prev, s);

    // Two -inf maxima mean the population is stuck at unreachable targets:
    // treat as a plateau. A single -inf gives an infinite delta, so the
    // momentum term vanishes.
    double p_new;
    if (curr == kNegInf && prev == kNegInf) {
        p_new = p_max;
    } else {
        const double delta = std::abs(curr - prev);
        p_new = (delta == 0.0) ? p_max : alpha * p_old + beta / delta;
    }
    return std::clamp(p_new, 0.0, p_max);
}

SparseGradient estimate_gradient(const audio::AudioBuffer& x, const Oracle& oracle,
                                 const ctc::Phrase& target,
                                 std::span<const std::size_t> indices, double delta,
                                 std::size_t workers) {
    const OracleResponse base = oracle.score(x, target);
    return estimate_gradient(x, -base.loss, oracle, target, indices, delta, workers);
}

SparseGradient estimate_gradient(const audio::AudioBuffer& x, double base_score,
                                 const Oracle& oracle, const ctc::Phrase& target,
                                 std::span<const std::size_t> indices, double delta,
                                 std::size_t workers) {
    if (!(delta > 0.0)) {
        throw_error(ErrorCode::InvalidArgument, "estimate_gradient: delta must be > 0");
    }
    if (!std::isfinite(base_score)) {
        throw_error(ErrorCode::InvalidArgument, "estimate_gradient: base score is not finite");
    }
    std::vector<bool> seen(x.size(), false);
    for (std::size_t idx : indices) {
        if (idx >= x.size()) {
            throw_error(ErrorCode::InvalidArgument,
                        "estimate_gradient: index " + std::to_string(idx) + " out of range");
        }
        if (seen[idx]) {
            throw_error(ErrorCode::InvalidArgument,
                        "estimate_gradient: duplicate index " + std::to_string(idx));
        }
        seen[idx] = true;
    }

    SparseGradient grad;
    grad.indices.assign(indices.begin(), indices.end());
    grad.values.assign(indices.size(), 0.0);
    parallel_for(indices.size(), workers, [&](std::size_t slot) {
        const std::size_t idx = indices[slot];
        audio::AudioBuffer probe = x;
        probe.samples[idx] += delta;
        try {
            const OracleResponse r = oracle.score(probe, target);
            grad.values[slot] = (-r.loss - base_score) / delta;
        } catch (const Error& e) {
            throw Error(e.code(), "estimating gradient at index " + std::to_string(idx) +
                                      ": " + e.what());
        }
    });
    return grad;
}

audio::AudioBuffer gradient_step(const audio::AudioBuffer& x, const SparseGradient& grad,
                                 double step) {
    audio::AudioBuffer out = x;
    for (std::size_t slot = 0; slot < grad.indices.size(); ++slot) {
        const std::size_t idx = grad.indices[slot];
        const double v = grad.values[slot];
        if (idx >= out.size()) {
            throw_error(ErrorCode::InvalidArgument,
                        "gradient_step: index " + std::to_string(idx) + " out of range");
        }
        if (!std::isfinite(v)) {
            throw_error(ErrorCode::InvalidArgument,
                        "gradient_step: non-finite gradient component at index " +
                            std::to_string(idx));
        }
        out.samples[idx] += step * v;
    }
    return out;
}

AttackResult run_attack(const audio::AudioBuffer& x, const ctc::Phrase& target,
                        const Oracle& oracle, const AttackConfig& config,
                        std::size_t workers) {
    validate_config(config);
    if (x.empty()) {
        throw_error(ErrorCode::InvalidArgument, "attack input must be non-empty");
    }
    if (x.sample_rate != 16000) {
        throw_error(ErrorCode::InvalidArgument, "attack inputs must be sampled at 16 kHz");
    }
    for (double v : x.samples) {
        if (!std::isfinite(v)) {
            throw_error(ErrorCode::InvalidArgument, "attack input contains non-finite samples");
        }
    }

    const dsp::BiquadCoeffs highpass = dsp::design_highpass(x.sample_rate, kHighpassCutoffHz);
    const std::size_t n = config.population_size;

    AttackResult result;
    auto finalize = [&](const audio::AudioBuffer& adversarial, const ctc::Phrase& transcript) {
        result.adversarial = adversarial;
        result.transcript = transcript;
        result.success = transcript == target;
        result.levenshtein = metrics::levenshtein(target.text(), transcript.text());
        result.correlation = (adversarial.samples == x.samples)
                                 ? 1.0
                                 : dsp::cross_correlation(x, adversarial);
        result.iterations_used = result.trace.size();
    };

    // Entry evaluation; the initial population is identical copies of x, so
    // one query covers every member.
    OracleResponse entry;
    try {
        entry = oracle.score(x, target);
    } catch (const Error& e) {
        finalize(x, ctc::Phrase());
        throw AttackAborted(e, std::move(result));
    }
    ScoredMember best_ever{x, -entry.loss, entry.transcript};
    if (entry.transcript == target) {
        finalize(x, entry.transcript);
        return result;
    }

    Population pop = initialize_population(x, n);
    pop.scores.assign(n, -entry.loss);
    pop.transcripts.assign(n, entry.transcript);
    pop.best_index = 0;

    double p = config.mutation_p_init;

    try {
        for (std::size_t generation = 1; generation <= config.max_iters; ++generation) {
            pop.best_index = argmax_lowest(pop.scores);
            if (pop.transcripts[pop.best_index] == target) {
                finalize(pop.members[pop.best_index], pop.transcripts[pop.best_index]);
                return result;
            }

            const double population_best = pop.scores[pop.best_index];
            const std::size_t edit_distance = metrics::levenshtein(
                target.text(), pop.transcripts[pop.best_index].text());

            Phase phase;
            if (edit_distance > config.phase_switch_edit_distance) {
                phase = Phase::Genetic;
                const std::vector<std::size_t> elite =
                    elite_indices(pop.scores, config.elite_frac);
                std::vector<double> elite_scores(elite.size());
                for (std::size_t i = 0; i < elite.size(); ++i) {
                    elite_scores[i] = pop.scores[elite[i]];
                }

                std::vector<audio::AudioBuffer> children;
                children.reserve(n);
                children.push_back(best_ever.audio);  // elitism slot
                for (std::size_t i = 1; i < n; ++i) {
                    Rng rng(child_seed(config.seed, generation, i));
                    const std::size_t a = select_parent(elite_scores, rng);
                    const std::size_t b = select_parent(elite_scores, rng);
                    children.push_back(mutate(
                        crossover(pop.members[elite[a]], pop.members[elite[b]], rng), p,
                        config.noise, highpass, rng));
                }

                std::vector<double> new_scores;
                std::vector<ctc::Phrase> new_transcripts;
                score_members(oracle, target, children, workers, new_scores, new_transcripts);
                p = momentum_update(p, new_scores, pop.scores, config.alpha, config.beta,
                                    config.p_max);
                pop.members = std::move(children);
                pop.scores = std::move(new_scores);
                pop.transcripts = std::move(new_transcripts);
            } else {
                phase = Phase::Gradient;
                Rng rng(gradient_seed(config.seed, generation));
                const std::vector<std::size_t> indices =
                    sample_distinct_indices(config.fd_indices, x.size(), rng);
                const audio::AudioBuffer& top = pop.members[pop.best_index];
                const SparseGradient grad =
                    estimate_gradient(top, population_best, oracle, target, indices,
                                      config.fd_delta, workers);
                const audio::AudioBuffer stepped = gradient_step(top, grad, config.fd_step);
                const OracleResponse r = oracle.score(stepped, target);
                pop.members.assign(n, stepped);
                pop.scores.assign(n, -r.loss);
                pop.transcripts.assign(n, r.transcript);
            }

            const std::size_t new_best = argmax_lowest(pop.scores);
            if (pop.scores[new_best] > best_ever.score) {
                best_ever = {pop.members[new_best], pop.scores[new_best],
                             pop.transcripts[new_best]};
            }

            result.trace.push_back({generation, phase, edit_distance, population_best,
                                    best_ever.score, p});
        }
    } catch (const AttackAborted&) {
        throw;
    } catch (const Error& e) {
        finalize(best_ever.audio, best_ever.transcript);
        throw AttackAborted(e, std::move(result));
    }

    // Final guard check after the last generation.
    pop.best_index = argmax_lowest(pop.scores);
    if (pop.transcripts[pop.best_index] == target) {
        finalize(pop.members[pop.best_index], pop.transcripts[pop.best_index]);
        return result;
    }

    finalize(best_ever.audio, best_ever.transcript);
    return result;
}

}  // namespace bba::attack
