#pragma once

#include <cstddef>
#include <string>

#include "phrase.hpp"

namespace bba::metrics {

// Unit-cost insert/delete/substitute edit distance.
std::size_t levenshtein(const std::string& a, const std::string& b);

// 1 - levenshtein(decoded, target) / len(original_decoded), clamped to [0, 1].
// The denominator is the length of the original transcription, not the target.
double target_similarity(const ctc::Phrase& decoded, const ctc::Phrase& target,
                         const ctc::Phrase& original_decoded);

}  // namespace bba::metrics
