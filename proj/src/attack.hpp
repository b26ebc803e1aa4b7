#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "audio_io.hpp"
#include "dsp.hpp"
#include "oracle.hpp"
#include "phrase.hpp"
#include "rng.hpp"

namespace bba::attack {

struct AttackConfig {
    std::size_t population_size = 100;
    std::size_t max_iters = 3000;
    double elite_frac = 0.1;
    std::size_t phase_switch_edit_distance = 2;
    double mutation_p_init = 0.005;
    double alpha = 0.99;  // momentum decay
    double beta = 0.001;  // momentum gain over score plateaus
    double p_max = 0.1;   // mutation probability cap
    dsp::NoiseConfig noise;
    std::size_t fd_indices = 100;
    double fd_delta = 1.0;
    double fd_step = 1.0;
    std::uint64_t seed = 0;
};

// Throws on any violated field constraint.
void validate_config(const AttackConfig& config);

enum class Phase { Genetic, Gradient };

struct GenerationRecord {
    std::size_t generation = 0;  // 1-based
    Phase phase = Phase::Genetic;
    std::size_t edit_distance = 0;  // distance that drove the phase decision
    double population_best_score = 0.0;
    double best_score = 0.0;  // best score seen so far; non-decreasing
    double mutation_p = 0.0;  // value after this generation's update
};

struct Population {
    std::vector<audio::AudioBuffer> members;
    std::vector<double> scores;  // -loss, set by the first scoring pass
    std::vector<ctc::Phrase> transcripts;
    std::size_t best_index = 0;
};

struct AttackResult {
    audio::AudioBuffer adversarial;
    ctc::Phrase transcript;
    std::size_t iterations_used = 0;
    bool success = false;
    std::vector<GenerationRecord> trace;
    double correlation = 0.0;
    std::size_t levenshtein = 0;
};

// Raised when an oracle failure aborts a run; carries what was computed so far.
class AttackAborted : public Error {
public:
    AttackAborted(const Error& cause, AttackResult partial_result)
        : Error(cause.code(), cause.what()), partial(std::move(partial_result)) {}

    AttackResult partial;
};

struct SparseGradient {
    std::vector<std::size_t> indices;
    std::vector<double> values;
};

// size identical copies of x; scores stay empty until the first scoring pass.
Population initialize_population(const audio::AudioBuffer& x, std::size_t size);

// Index drawn with probability softmax(scores). -inf scores get probability
// zero; if every score is -inf the draw is uniform.
std::size_t select_parent(std::span<const double> elite_scores, Rng& rng);

// Each sample independently copied from either parent with probability 1/2.
audio::AudioBuffer crossover(const audio::AudioBuffer& p1, const audio::AudioBuffer& p2,
                             Rng& rng);

// Draws a full-length noise vector, highpass-filters it once, then adds the
// filtered value at each index independently with probability p.
audio::AudioBuffer mutate(const audio::AudioBuffer& x, double p, const dsp::NoiseConfig& noise,
                          const dsp::BiquadCoeffs& highpass, Rng& rng);

// p_new = alpha * p_old + beta / |max(new) - max(old)|, clamped to [0, p_max].
// A zero score delta (stuck population) returns p_max.
double momentum_update(double p_old, std::span<const double> new_scores,
                       std::span<const double> old_scores, double alpha, double beta,
                       double p_max);

// Coordinate-wise forward differences of the score (-loss) at the given
// indices: (g(x + delta*e_i) - g(x)) / delta. The first overload evaluates the
// base point itself (|indices| + 1 oracle calls); the second reuses a known
// base score (|indices| calls).
SparseGradient estimate_gradient(const audio::AudioBuffer& x, const Oracle& oracle,
                                 const ctc::Phrase& target,
                                 std::span<const std::size_t> indices, double delta,
                                 std::size_t workers = 1);
SparseGradient estimate_gradient(const audio::AudioBuffer& x, double base_score,
                                 const Oracle& oracle, const ctc::Phrase& target,
                                 std::span<const std::size_t> indices, double delta,
                                 std::size_t workers = 1);

// x + step * grad.
audio::AudioBuffer gradient_step(const audio::AudioBuffer& x, const SparseGradient& grad,
                                 double step);

// The full two-phase optimization: genetic search with momentum mutation
// while the decode is far from the target, coordinate-wise gradient
// estimation once it is close. `workers` parallelizes oracle calls only;
// results are identical for any worker count.
AttackResult run_attack(const audio::AudioBuffer& x, const ctc::Phrase& target,
                        const Oracle& oracle, const AttackConfig& config,
                        std::size_t workers = 1);

}  // namespace bba::attack
