#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "audio_io.hpp"
#include "ctc.hpp"
#include "oracle.hpp"

namespace bba::victim {

// Deterministic stand-in for a production speech-to-text model. The weights
// are a fixed seeded random draw, never trained; every response is a pure
// function of (seed, audio, target).
struct ToyVictimParams {
    std::uint64_t seed = 0;
    std::size_t frame_len = 320;
    std::size_t hop = 320;
    std::size_t hidden_dim = 32;
};

class ToyVictim {
public:
    explicit ToyVictim(const ToyVictimParams& params);

    // Frames the audio (T = floor((len - frame_len) / hop) + 1) and maps each
    // mean-removed window through affine -> tanh -> affine to 28 logits.
    // Samples are snapped to the int16 grid first, exactly as a 16-bit model
    // input would be, so local scoring matches the wire encoding bit for bit.
    ctc::LogitMatrix forward(const audio::AudioBuffer& audio) const;

    const ToyVictimParams& params() const { return params_; }

private:
    ToyVictimParams params_;
    std::vector<double> w1_;  // hidden_dim x frame_len, row-major
    std::vector<double> b1_;  // hidden_dim
    std::vector<double> w2_;  // 28 x hidden_dim, row-major
    std::vector<double> b2_;  // 28
};

// One-shot convenience around ToyVictim::forward.
ctc::LogitMatrix toy_forward(const audio::AudioBuffer& audio, const ToyVictimParams& params);

class ToyOracle : public Oracle {
public:
    explicit ToyOracle(const ToyVictimParams& params) : model_(params) {}

    OracleResponse score(const audio::AudioBuffer& audio,
                         const ctc::Phrase& target) const override;

    const ToyVictim& model() const { return model_; }

private:
    ToyVictim model_;
};

}  // namespace bba::victim
