#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ctc.hpp"
#include "rng.hpp"

namespace testutil {

// Log-prob matrix with mass restricted to `symbols`: random logits on the
// subset, normalized there, -inf elsewhere.
inline bba::ctc::LogitMatrix random_restricted_logprobs(std::size_t frames,
                                                        const std::vector<int>& symbols,
                                                        bba::Rng& rng) {
    bba::ctc::LogitMatrix m(frames);
    const double neg_inf = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < frames; ++t) {
        for (int s = 0; s < bba::ctc::kAlphabetSize; ++s) m.at(t, s) = neg_inf;
        double max_v = neg_inf;
        for (int s : symbols) {
            m.at(t, s) = rng.gaussian(0.0, 2.0);
            max_v = std::max(max_v, m.at(t, s));
        }
        double acc = 0.0;
        for (int s : symbols) acc += std::exp(m.at(t, s) - max_v);
        const double lse = max_v + std::log(acc);
        for (int s : symbols) m.at(t, s) -= lse;
    }
    return m;
}

// Random phrase (possibly empty) over the non-blank members of `symbols`.
inline bba::ctc::Phrase random_phrase(std::size_t max_len, const std::vector<int>& symbols,
                                      bba::Rng& rng) {
    std::vector<int> letters;
    for (int s : symbols) {
        if (s != bba::ctc::kBlank) letters.push_back(s);
    }
    std::string text;
    if (!letters.empty()) {
        const std::size_t len = static_cast<std::size_t>(rng.below(max_len + 1));
        for (std::size_t i = 0; i < len; ++i) {
            text.push_back(bba::ctc::symbol_char(
                letters[static_cast<std::size_t>(rng.below(letters.size()))]));
        }
    }
    return bba::ctc::Phrase(text);
}

}  // namespace testutil
