#include "victim.hpp"

#include <cmath>

#include "errors.hpp"
#include "rng.hpp"

namespace bba::victim {

namespace {

void fill_scaled_gaussian(std::vector<double>& out, std::size_t count, double fan_in, Rng& rng) {
    out.resize(count);
    const double scale = 1.0 / std::sqrt(fan_in);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = rng.gaussian() * scale;
    }
}

}  // namespace

ToyVictim::ToyVictim(const ToyVictimParams& params) : params_(params) {
    if (params_.hop == 0 || params_.frame_len < params_.hop) {
        throw_error(ErrorCode::InvalidArgument, "toy victim requires hop > 0 and frame_len >= hop");
    }
    if (params_.hidden_dim == 0) {
        throw_error(ErrorCode::InvalidArgument, "toy victim requires hidden_dim > 0");
    }
    Rng rng(params_.seed);
    fill_scaled_gaussian(w1_, params_.hidden_dim * params_.frame_len,
                         static_cast<double>(params_.frame_len), rng);
    fill_scaled_gaussian(b1_, params_.hidden_dim, static_cast<double>(params_.frame_len), rng);
    fill_scaled_gaussian(w2_, static_cast<std::size_t>(ctc::kAlphabetSize) * params_.hidden_dim,
                         static_cast<double>(params_.hidden_dim), rng);
    fill_scaled_gaussian(b2_, ctc::kAlphabetSize, static_cast<double>(params_.hidden_dim), rng);
}

ctc::LogitMatrix ToyVictim::forward(const audio::AudioBuffer& audio) const {
    const std::size_t len = audio.size();
    if (len < params_.frame_len) {
        throw_error(ErrorCode::InvalidArgument,
                    "audio shorter than one frame (" + std::to_string(len) + " < " +
                        std::to_string(params_.frame_len) + " samples)");
    }

    // Snap to the int16 grid and normalize to [-1, 1).
    std::vector<double> normalized(len);
    for (std::size_t i = 0; i < len; ++i) {
        normalized[i] = static_cast<double>(audio::quantize_sample(audio.samples[i])) / 32768.0;
    }

    const std::size_t frames = (len - params_.frame_len) / params_.hop + 1;
    const double frame_rate =
        static_cast<double>(audio.sample_rate) / static_cast<double>(params_.hop);
    ctc::LogitMatrix logits(frames, frame_rate);

    std::vector<double> window(params_.frame_len);
    std::vector<double> hidden(params_.hidden_dim);
    for (std::size_t t = 0; t < frames; ++t) {
        const double* src = normalized.data() + t * params_.hop;
        double mean = 0.0;
        for (std::size_t i = 0; i < params_.frame_len; ++i) mean += src[i];
        mean /= static_cast<double>(params_.frame_len);
        for (std::size_t i = 0; i < params_.frame_len; ++i) window[i] = src[i] - mean;

        for (std::size_t j = 0; j < params_.hidden_dim; ++j) {
            const double* w = w1_.data() + j * params_.frame_len;
            double acc = b1_[j];
            for (std::size_t i = 0; i < params_.frame_len; ++i) acc += w[i] * window[i];
            hidden[j] = std::tanh(acc);
        }

        double* row = logits.row(t);
        for (int s = 0; s < ctc::kAlphabetSize; ++s) {
            const double* w = w2_.data() + static_cast<std::size_t>(s) * params_.hidden_dim;
            double acc = b2_[s];
            for (std::size_t j = 0; j < params_.hidden_dim; ++j) acc += w[j] * hidden[j];
            row[s] = acc;
        }
    }
    return logits;
}

ctc::LogitMatrix toy_forward(const audio::AudioBuffer& audio, const ToyVictimParams& params) {
    return ToyVictim(params).forward(audio);
}

OracleResponse ToyOracle::score(const audio::AudioBuffer& audio,
                                const ctc::Phrase& target) const {
    if (audio.empty()) {
        throw_error(ErrorCode::InvalidArgument, "cannot score empty audio");
    }
    const ctc::LogitMatrix logits = model_.forward(audio);
    OracleResponse response;
    response.loss = ctc::ctc_loss(logits, target);
    response.transcript = ctc::greedy_decode(logits);
    return response;
}

}  // namespace bba::victim
