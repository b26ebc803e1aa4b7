#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "phrase.hpp"

namespace bba::ctc {

// Output alphabet: indices 0..25 are 'a'..'z', 26 is space, 27 is the blank.
inline constexpr int kAlphabetSize = 28;
inline constexpr int kSpace = 26;
inline constexpr int kBlank = 27;

int symbol_index(char c);
char symbol_char(int index);  // blank has no character; throws for kBlank

// T x 28 matrix of per-frame scores, row-major.
class LogitMatrix {
public:
    LogitMatrix(std::size_t frames, double frame_rate = 50.0)
        : frames_(frames), frame_rate_(frame_rate), values_(frames * kAlphabetSize, 0.0) {}

    std::size_t frames() const { return frames_; }
    double frame_rate() const { return frame_rate_; }

    double* row(std::size_t t) { return values_.data() + t * kAlphabetSize; }
    const double* row(std::size_t t) const { return values_.data() + t * kAlphabetSize; }

    double& at(std::size_t t, int symbol) { return values_[t * kAlphabetSize + symbol]; }
    double at(std::size_t t, int symbol) const { return values_[t * kAlphabetSize + symbol]; }

private:
    std::size_t frames_;
    double frame_rate_;
    std::vector<double> values_;
};

// Merges adjacent duplicates, then deletes blanks.
Phrase collapse(std::span<const int> symbols);

// Row-wise log-softmax.
LogitMatrix log_softmax(const LogitMatrix& logits);

// log P(p | y) summed over all alignments collapsing to p, via the forward
// recursion over the blank-interleaved label sequence. Rows of `logprobs`
// must be normalized log-distributions. Returns -inf when p cannot be
// aligned within the available frames.
double ctc_log_likelihood(const LogitMatrix& logprobs, const Phrase& p);

// Exact log-likelihood by enumerating every path over `symbols` and summing
// the ones that collapse to p. Verification oracle for the forward recursion;
// refuses instances with more than 2^24 paths.
double brute_force_log_likelihood(const LogitMatrix& logprobs, const Phrase& p,
                                  std::span<const int> symbols);
double brute_force_log_likelihood(const LogitMatrix& logprobs, const Phrase& p);

// -log P(p | softmax(logits)); +inf when p is unreachable.
double ctc_loss(const LogitMatrix& logits, const Phrase& p);

// Per-frame argmax (ties resolved to the lowest symbol index), then collapse.
Phrase greedy_decode(const LogitMatrix& logits);

// The argmax path itself, before collapsing.
std::vector<int> argmax_path(const LogitMatrix& logits);

}  // namespace bba::ctc
