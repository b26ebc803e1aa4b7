#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "attack.hpp"
#include "errors.hpp"
#include "test_oracles.hpp"
#include "victim.hpp"

using namespace bba;
using attack::AttackConfig;
using attack::AttackResult;
using ctc::Phrase;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

audio::AudioBuffer random_clip(std::size_t n, double amplitude, std::uint64_t seed) {
    Rng rng(seed);
    audio::AudioBuffer b;
    b.samples.resize(n);
    for (auto& v : b.samples) v = std::round((rng.uniform() * 2.0 - 1.0) * amplitude);
    return b;
}

AttackConfig small_config() {
    AttackConfig cfg;
    cfg.population_size = 6;
    cfg.max_iters = 12;
    cfg.elite_frac = 0.5;
    cfg.fd_indices = 20;
    cfg.noise.sigma = 200.0;
    cfg.mutation_p_init = 0.02;
    cfg.seed = 77;
    return cfg;
}

std::size_t expected_oracle_calls(const AttackResult& result, const AttackConfig& cfg) {
    std::size_t calls = 1;  // entry evaluation of x
    for (const attack::GenerationRecord& r : result.trace) {
        calls += r.phase == attack::Phase::Genetic ? cfg.population_size : cfg.fd_indices + 1;
    }
    return calls;
}

bool results_identical(const AttackResult& a, const AttackResult& b) {
    if (a.adversarial.samples != b.adversarial.samples) return false;
    if (a.transcript != b.transcript || a.success != b.success) return false;
    if (a.iterations_used != b.iterations_used || a.levenshtein != b.levenshtein) return false;
    if (a.correlation != b.correlation) return false;
    if (a.trace.size() != b.trace.size()) return false;
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        const auto& ra = a.trace[i];
        const auto& rb = b.trace[i];
        if (ra.generation != rb.generation || ra.phase != rb.phase ||
            ra.edit_distance != rb.edit_distance ||
            ra.population_best_score != rb.population_best_score ||
            ra.best_score != rb.best_score || ra.mutation_p != rb.mutation_p) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("initialize_population") {
    const audio::AudioBuffer x = random_clip(100, 1000.0, 1);
    attack::Population pop = attack::initialize_population(x, 5);
    REQUIRE(pop.members.size() == 5);
    CHECK(pop.scores.empty());  // unevaluated until the first scoring pass
    for (const auto& m : pop.members) CHECK(m.samples == x.samples);

    // Members are independent copies.
    pop.members[0].samples[3] += 42.0;
    CHECK(pop.members[1].samples[3] == x.samples[3]);

    CHECK_THROWS_AS(attack::initialize_population(x, 1), Error);
}

TEST_CASE("select_parent follows the softmax") {
    SUBCASE("single candidate always wins") {
        Rng rng(2);
        const std::vector<double> one = {3.0};
        for (int i = 0; i < 50; ++i) CHECK(attack::select_parent(one, rng) == 0);
    }
    SUBCASE("equal scores split evenly") {
        Rng rng(3);
        const std::vector<double> scores = {1.5, 1.5};
        int first = 0;
        for (int i = 0; i < 10000; ++i) {
            if (attack::select_parent(scores, rng) == 0) ++first;
        }
        // 3 sigma of Binomial(10000, 0.5) is 150.
        CHECK(std::abs(first - 5000) <= 150);
    }
    SUBCASE("a 10-point lead is a near-certain pick") {
        Rng rng(4);
        const std::vector<double> scores = {10.0, 0.0};
        int first = 0;
        for (int i = 0; i < 10000; ++i) {
            if (attack::select_parent(scores, rng) == 0) ++first;
        }
        CHECK(first >= 9990);
    }
    SUBCASE("-inf scores are never picked") {
        Rng rng(5);
        const std::vector<double> scores = {kNegInf, 2.0, kNegInf};
        for (int i = 0; i < 200; ++i) CHECK(attack::select_parent(scores, rng) == 1);
    }
    SUBCASE("all -inf falls back to uniform") {
        Rng rng(6);
        const std::vector<double> scores = {kNegInf, kNegInf};
        int first = 0;
        for (int i = 0; i < 10000; ++i) {
            if (attack::select_parent(scores, rng) == 0) ++first;
        }
        CHECK(std::abs(first - 5000) <= 150);
    }
    SUBCASE("empty elite is an error") {
        Rng rng(7);
        CHECK_THROWS_AS(attack::select_parent({}, rng), Error);
    }
}

TEST_CASE("crossover mixes parents per sample") {
    Rng rng(8);
    const audio::AudioBuffer p1 = random_clip(100000, 1000.0, 10);
    audio::AudioBuffer p2 = p1;
    for (auto& v : p2.samples) v += 1.0;  // make parents distinguishable everywhere

    SUBCASE("identical parents give an identical child") {
        const audio::AudioBuffer child = attack::crossover(p1, p1, rng);
        CHECK(child.samples == p1.samples);
    }
    SUBCASE("every sample comes from one of the parents, about half from each") {
        const audio::AudioBuffer child = attack::crossover(p1, p2, rng);
        std::size_t from_p1 = 0;
        for (std::size_t i = 0; i < child.size(); ++i) {
            const bool is_p1 = child.samples[i] == p1.samples[i];
            const bool is_p2 = child.samples[i] == p2.samples[i];
            CHECK((is_p1 || is_p2));
            if (is_p1) ++from_p1;
        }
        const double fraction = static_cast<double>(from_p1) / 100000.0;
        CHECK(fraction >= 0.45);
        CHECK(fraction <= 0.55);
    }
    SUBCASE("length mismatch is an error") {
        audio::AudioBuffer shorter = p1;
        shorter.samples.pop_back();
        CHECK_THROWS_AS(attack::crossover(p1, shorter, rng), Error);
    }
}

TEST_CASE("mutate adds filtered noise with probability p") {
    const dsp::BiquadCoeffs hp = dsp::design_highpass(16000, 7000.0);
    dsp::NoiseConfig noise{0.0, 50.0, 0};
    const audio::AudioBuffer x = random_clip(100000, 1000.0, 11);

    SUBCASE("p = 0 leaves the input untouched") {
        Rng rng(12);
        CHECK(attack::mutate(x, 0.0, noise, hp, rng).samples == x.samples);
    }
    SUBCASE("p = 1 adds the filtered noise vector everywhere") {
        Rng rng(13);
        Rng rng_copy(13);
        const audio::AudioBuffer out = attack::mutate(x, 1.0, noise, hp, rng);
        const std::vector<double> expected_noise =
            dsp::apply_filter(hp, dsp::sample_noise(x.size(), noise, rng_copy));
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(out.samples[i] == x.samples[i] + expected_noise[i]);
        }
    }
    SUBCASE("mutated fraction concentrates near p") {
        Rng rng(14);
        const audio::AudioBuffer out = attack::mutate(x, 0.1, noise, hp, rng);
        std::size_t changed = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (out.samples[i] != x.samples[i]) ++changed;
        }
        const double fraction = static_cast<double>(changed) / 100000.0;
        CHECK(fraction >= 0.09);
        CHECK(fraction <= 0.11);
    }
    SUBCASE("invalid p is an error") {
        Rng rng(15);
        CHECK_THROWS_AS(attack::mutate(x, 1.5, noise, hp, rng), Error);
    }
}

TEST_CASE("momentum_update arithmetic") {
    const std::vector<double> old_scores = {-30.0, -20.0};

    SUBCASE("delta of 10") {
        const std::vector<double> new_scores = {-10.0, -12.0};
        const double p = attack::momentum_update(0.005, new_scores, old_scores, 0.99, 0.001, 0.1);
        CHECK(p == doctest::Approx(0.00505).epsilon(1e-12));
    }
    SUBCASE("zero delta returns the cap") {
        const std::vector<double> same = {-20.0, -25.0};
        CHECK(attack::momentum_update(0.005, same, old_scores, 0.99, 0.001, 0.1) == 0.1);
    }
    SUBCASE("huge improvements decay toward alpha * p") {
        const std::vector<double> new_scores = {1e6 - 20.0};
        const double p = attack::momentum_update(0.005, new_scores, old_scores, 0.99, 0.001, 0.1);
        CHECK(p == doctest::Approx(0.00495).epsilon(1e-6));
    }
    SUBCASE("result is clamped to p_max") {
        const std::vector<double> new_scores = {-20.0 + 1e-9};
        CHECK(attack::momentum_update(0.09, new_scores, old_scores, 0.99, 0.001, 0.1) == 0.1);
    }
    SUBCASE("-inf plateaus count as stuck") {
        const std::vector<double> dead = {kNegInf};
        CHECK(attack::momentum_update(0.005, dead, dead, 0.99, 0.001, 0.1) == 0.1);
        // One-sided -inf: infinite delta, momentum term vanishes.
        CHECK(attack::momentum_update(0.005, old_scores, dead, 0.99, 0.001, 0.1) ==
              doctest::Approx(0.99 * 0.005));
    }
    SUBCASE("empty lists are an error") {
        CHECK_THROWS_AS(attack::momentum_update(0.005, {}, old_scores, 0.99, 0.001, 0.1),
                        Error);
    }
}

TEST_CASE("estimate_gradient matches the analytic gradient of the quadratic") {
    // Score is -sum (x_i - c_i)^2, so d(score)/dx_i = -2 (x_i - c_i).
    const std::size_t n = 64;
    Rng rng(16);
    audio::AudioBuffer x = random_clip(n, 20.0, 17);
    std::vector<double> center(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double offset = 1.0 + 9.0 * rng.uniform();  // |x - c| in [1, 10]
        center[i] = x.samples[i] - (rng.uniform() < 0.5 ? offset : -offset);
    }
    const testutil::QuadraticOracle oracle(center);

    std::vector<std::size_t> indices(n);
    std::iota(indices.begin(), indices.end(), 0);
    const attack::SparseGradient grad =
        attack::estimate_gradient(x, oracle, Phrase("a"), indices, 1e-3);

    REQUIRE(grad.indices.size() == n);
    for (std::size_t slot = 0; slot < n; ++slot) {
        const std::size_t i = grad.indices[slot];
        const double analytic = -2.0 * (x.samples[i] - center[i]);
        CHECK(std::abs(grad.values[slot] - analytic) / std::abs(analytic) <= 1e-3);
    }
}

TEST_CASE("estimate_gradient structural contracts") {
    const std::size_t n = 32;
    audio::AudioBuffer x = random_clip(n, 20.0, 18);
    std::vector<double> center(n, 0.0);

    SUBCASE("coordinates the oracle ignores get a zero component") {
        const testutil::QuadraticOracle oracle(center, /*first_active=*/4);
        const std::vector<std::size_t> indices = {0, 1, 2, 3, 10};
        const attack::SparseGradient grad =
            attack::estimate_gradient(x, oracle, Phrase("a"), indices, 1e-3);
        for (std::size_t slot = 0; slot < 4; ++slot) CHECK(grad.values[slot] == 0.0);
        CHECK(grad.values[4] != 0.0);
    }
    SUBCASE("only sampled indices appear") {
        const testutil::QuadraticOracle oracle(center);
        const std::vector<std::size_t> indices = {3, 7};
        const attack::SparseGradient grad =
            attack::estimate_gradient(x, oracle, Phrase("a"), indices, 1e-3);
        CHECK(grad.indices == std::vector<std::size_t>{3, 7});
    }
    SUBCASE("call budget is |indices| + 1 standalone, |indices| with a base score") {
        const testutil::QuadraticOracle quad(center);
        const testutil::CountingOracle oracle(quad);
        const std::vector<std::size_t> indices = {1, 2, 3, 4, 5};
        attack::estimate_gradient(x, oracle, Phrase("a"), indices, 1e-3);
        CHECK(oracle.calls() == 6);

        const double base = -quad.score(x, Phrase("a")).loss;
        oracle.reset();
        attack::estimate_gradient(x, base, oracle, Phrase("a"), indices, 1e-3);
        CHECK(oracle.calls() == 5);
    }
    SUBCASE("duplicate or out-of-range indices are rejected") {
        const testutil::QuadraticOracle oracle(center);
        CHECK_THROWS_AS(attack::estimate_gradient(x, oracle, Phrase("a"),
                                                  std::vector<std::size_t>{1, 1}, 1e-3),
                        Error);
        CHECK_THROWS_AS(attack::estimate_gradient(x, oracle, Phrase("a"),
                                                  std::vector<std::size_t>{n + 5}, 1e-3),
                        Error);
    }
    SUBCASE("oracle failures carry the offending index") {
        const testutil::QuadraticOracle quad(center);
        const testutil::FailingOracle failing(quad, 3);  // fails from the 4th call on
        const std::vector<std::size_t> indices = {0, 1, 2, 3, 4};
        try {
            attack::estimate_gradient(x, failing, Phrase("a"), indices, 1e-3, /*workers=*/1);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("index 2") != std::string::npos);
        }
    }
}

TEST_CASE("gradient_step") {
    audio::AudioBuffer x = random_clip(16, 100.0, 19);

    SUBCASE("zero gradient leaves x unchanged") {
        const attack::SparseGradient zero{{1, 2}, {0.0, 0.0}};
        CHECK(attack::gradient_step(x, zero, 1.0).samples == x.samples);
    }
    SUBCASE("unit component moves one position") {
        const attack::SparseGradient e3{{3}, {1.0}};
        const audio::AudioBuffer out = attack::gradient_step(x, e3, 1.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(out.samples[i] == x.samples[i] + (i == 3 ? 1.0 : 0.0));
        }
    }
    SUBCASE("a small step along the estimate improves the quadratic score") {
        const std::size_t n = 16;
        std::vector<double> center(n, 5.0);
        const testutil::QuadraticOracle oracle(center);
        std::vector<std::size_t> indices(n);
        std::iota(indices.begin(), indices.end(), 0);
        const attack::SparseGradient grad =
            attack::estimate_gradient(x, oracle, Phrase("a"), indices, 1e-3);
        const audio::AudioBuffer stepped = attack::gradient_step(x, grad, 0.1);
        CHECK(-oracle.score(stepped, Phrase("a")).loss >= -oracle.score(x, Phrase("a")).loss);
    }
    SUBCASE("non-finite components are rejected") {
        const attack::SparseGradient bad{{0}, {std::numeric_limits<double>::quiet_NaN()}};
        CHECK_THROWS_AS(attack::gradient_step(x, bad, 1.0), Error);
    }
}

TEST_CASE("run_attack loop guards") {
    victim::ToyVictimParams params;
    params.seed = 5;
    const victim::ToyOracle oracle(params);

    // Find a clip whose transcript is non-empty so it can be its own target.
    audio::AudioBuffer clip;
    Phrase transcript;
    for (std::uint64_t s = 0;; ++s) {
        clip = random_clip(1600, 3000.0, 200 + s);
        transcript = oracle.score(clip, Phrase("a")).transcript;
        if (!transcript.empty()) break;
    }

    SUBCASE("already-decoding input returns immediately") {
        const AttackResult r = attack::run_attack(clip, transcript, oracle, small_config());
        CHECK(r.success);
        CHECK(r.iterations_used == 0);
        CHECK(r.trace.empty());
        CHECK(r.adversarial.samples == clip.samples);
        CHECK(r.correlation == 1.0);
        CHECK(r.levenshtein == 0);
    }
    SUBCASE("max_iters 0 evaluates the guard and stops") {
        AttackConfig cfg = small_config();
        cfg.max_iters = 0;
        const AttackResult hit = attack::run_attack(clip, transcript, oracle, cfg);
        CHECK(hit.success);
        CHECK(hit.iterations_used == 0);

        const AttackResult miss = attack::run_attack(clip, Phrase("zq"), oracle, cfg);
        CHECK_FALSE(miss.success);
        CHECK(miss.iterations_used == 0);
        CHECK(miss.adversarial.samples == clip.samples);
    }
    SUBCASE("non-16k inputs are rejected") {
        audio::AudioBuffer wrong_rate = clip;
        wrong_rate.sample_rate = 8000;
        CHECK_THROWS_AS(attack::run_attack(wrong_rate, transcript, oracle, small_config()),
                        Error);
    }
}

TEST_CASE("run_attack structural invariants on a short run") {
    victim::ToyVictimParams params;
    params.seed = 6;
    const victim::ToyOracle toy(params);
    const testutil::CountingOracle oracle(toy);
    const audio::AudioBuffer clip = random_clip(1600, 3000.0, 33);

    AttackConfig cfg = small_config();
    const Phrase target("xq");  // far from any decode: keeps the run genetic-heavy

    const AttackResult r = attack::run_attack(clip, target, oracle, cfg);

    SUBCASE("oracle budget is exact per phase") {
        CHECK(oracle.calls() == expected_oracle_calls(r, cfg));
    }
    SUBCASE("phase decision matches the recorded edit distance") {
        for (const auto& rec : r.trace) {
            const bool genetic = rec.edit_distance > cfg.phase_switch_edit_distance;
            CHECK((rec.phase == attack::Phase::Genetic) == genetic);
        }
    }
    SUBCASE("best score is monotone and p stays within bounds") {
        double prev = kNegInf;
        for (const auto& rec : r.trace) {
            CHECK(rec.best_score >= prev);
            prev = rec.best_score;
            CHECK(rec.mutation_p >= 0.0);
            CHECK(rec.mutation_p <= cfg.p_max);
        }
    }
    SUBCASE("trace length equals iterations used") {
        CHECK(r.trace.size() == r.iterations_used);
        CHECK(r.iterations_used == cfg.max_iters);  // "xq" is not reachable this fast
    }
}

TEST_CASE("run_attack reaches the gradient phase when the decode is close") {
    victim::ToyVictimParams params;
    params.seed = 7;
    const victim::ToyOracle oracle(params);

    // Pick a clip with a non-empty transcript, then target a 1-edit variant:
    // the phase switch triggers from generation 1.
    audio::AudioBuffer clip;
    Phrase transcript;
    for (std::uint64_t s = 0;; ++s) {
        clip = random_clip(1600, 3000.0, 300 + s);
        transcript = oracle.score(clip, Phrase("a")).transcript;
        if (transcript.size() == 1 && transcript.text() != "z") break;
    }
    std::string target_text = transcript.text();
    target_text[0] = target_text[0] == 'a' ? 'b' : 'a';

    AttackConfig cfg = small_config();
    cfg.max_iters = 4;
    const testutil::CountingOracle counting(oracle);
    const AttackResult r =
        attack::run_attack(clip, Phrase(target_text), counting, cfg);

    REQUIRE(!r.trace.empty());
    CHECK(r.trace[0].phase == attack::Phase::Gradient);
    CHECK(counting.calls() == expected_oracle_calls(r, cfg));
}

TEST_CASE("run_attack is deterministic and parallelism-independent") {
    victim::ToyVictimParams params;
    params.seed = 8;
    const victim::ToyOracle oracle(params);
    const audio::AudioBuffer clip = random_clip(1600, 3000.0, 44);
    AttackConfig cfg = small_config();
    cfg.max_iters = 6;

    const AttackResult a = attack::run_attack(clip, Phrase("qx"), oracle, cfg, 1);
    const AttackResult b = attack::run_attack(clip, Phrase("qx"), oracle, cfg, 1);
    const AttackResult c = attack::run_attack(clip, Phrase("qx"), oracle, cfg, 4);
    CHECK(results_identical(a, b));
    CHECK(results_identical(a, c));

    AttackConfig other = cfg;
    other.seed = cfg.seed + 1;
    const AttackResult d = attack::run_attack(clip, Phrase("qx"), oracle, other, 1);
    CHECK_FALSE(results_identical(a, d));
}

TEST_CASE("oracle failures abort with the partial trace attached") {
    victim::ToyVictimParams params;
    params.seed = 9;
    const victim::ToyOracle toy(params);
    const audio::AudioBuffer clip = random_clip(1600, 3000.0, 55);
    AttackConfig cfg = small_config();

    // Enough budget for the entry call and one full genetic generation, then fail.
    const testutil::FailingOracle failing(toy, 1 + cfg.population_size + 2);
    try {
        attack::run_attack(clip, Phrase("xq"), failing, cfg);
        FAIL("expected AttackAborted");
    } catch (const attack::AttackAborted& e) {
        CHECK(e.partial.trace.size() == 1);
        CHECK_FALSE(e.partial.success);
        CHECK(std::string(e.what()).find("injected oracle failure") != std::string::npos);
    }
}

TEST_CASE("invalid configs are rejected") {
    AttackConfig cfg;
    cfg.population_size = 1;
    CHECK_THROWS_AS(attack::validate_config(cfg), Error);
    cfg = AttackConfig{};
    cfg.elite_frac = 0.0;
    CHECK_THROWS_AS(attack::validate_config(cfg), Error);
    cfg = AttackConfig{};
    cfg.mutation_p_init = 0.5;  // above p_max
    CHECK_THROWS_AS(attack::validate_config(cfg), Error);
    cfg = AttackConfig{};
    cfg.alpha = 1.0;
    CHECK_THROWS_AS(attack::validate_config(cfg), Error);
    cfg = AttackConfig{};
    cfg.beta = 0.0;
    CHECK_THROWS_AS(attack::validate_config(cfg), Error);
    cfg = AttackConfig{};
    cfg.fd_delta = 0.0;
    CHECK_THROWS_AS(attack::validate_config(cfg), Error);
    CHECK_NOTHROW(attack::validate_config(AttackConfig{}));
}
