#include "ctc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace bba::ctc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp2(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double row_log_sum_exp(const double* row) {
    double m = kNegInf;
    for (int s = 0; s < kAlphabetSize; ++s) m = std::max(m, row[s]);
    if (m == kNegInf) return kNegInf;
    double acc = 0.0;
    for (int s = 0; s < kAlphabetSize; ++s) acc += std::exp(row[s] - m);
    return m + std::log(acc);
}

// Blank-interleaved label sequence: blank p0 blank p1 ... blank.
std::vector<int> extend_with_blanks(const Phrase& p) {
    std::vector<int> out;
    out.reserve(2 * p.size() + 1);
    out.push_back(kBlank);
    for (char c : p.text()) {
        out.push_back(symbol_index(c));
        out.push_back(kBlank);
    }
    return out;
}

void check_rows_normalized(const LogitMatrix& logprobs) {
    for (std::size_t t = 0; t < logprobs.frames(); ++t) {
        const double lse = row_log_sum_exp(logprobs.row(t));
        if (!(std::abs(lse) <= 1e-6)) {
            throw_error(ErrorCode::InvalidArgument,
                        "row " + std::to_string(t) + " is not a normalized log-distribution");
        }
    }
}

}  // namespace

int symbol_index(char c) {
    if (c >= 'a' && c <= 'z') return c - 'a';
    if (c == ' ') return kSpace;
    throw_error(ErrorCode::InvalidArgument, std::string("no symbol for character '") + c + "'");
}

char symbol_char(int index) {
    if (index >= 0 && index < 26) return static_cast<char>('a' + index);
    if (index == kSpace) return ' ';
    throw_error(ErrorCode::InvalidArgument,
                "symbol index " + std::to_string(index) + " has no character");
}

Phrase collapse(std::span<const int> symbols) {
    std::string out;
    int prev = -1;
    for (int s : symbols) {
        if (s < 0 || s >= kAlphabetSize) {
            throw_error(ErrorCode::InvalidArgument,
                        "symbol index out of range: " + std::to_string(s));
        }
        if (s != prev && s != kBlank) {
            out.push_back(symbol_char(s));
        }
        prev = s;
    }
    return Phrase(out);
}

LogitMatrix log_softmax(const LogitMatrix& logits) {
    LogitMatrix out(logits.frames(), logits.frame_rate());
    for (std::size_t t = 0; t < logits.frames(); ++t) {
        const double* in_row = logits.row(t);
        double* out_row = out.row(t);
        double m = in_row[0];
        for (int s = 1; s < kAlphabetSize; ++s) m = std::max(m, in_row[s]);
        double acc = 0.0;
        for (int s = 0; s < kAlphabetSize; ++s) acc += std::exp(in_row[s] - m);
        const double lse = m + std::log(acc);
        for (int s = 0; s < kAlphabetSize; ++s) out_row[s] = in_row[s] - lse;
    }
    return out;
}

double ctc_log_likelihood(const LogitMatrix& logprobs, const Phrase& p) {
    if (logprobs.frames() == 0) {
        throw_error(ErrorCode::InvalidArgument, "logit matrix must have at least one frame");
    }
    check_rows_normalized(logprobs);

    const std::vector<int> labels = extend_with_blanks(p);
    const std::size_t L = labels.size();
    const std::size_t T = logprobs.frames();

    std::vector<double> alpha(L, kNegInf);
    std::vector<double> next(L, kNegInf);

    alpha[0] = logprobs.at(0, labels[0]);
    if (L > 1) alpha[1] = logprobs.at(0, labels[1]);

    for (std::size_t t = 1; t < T; ++t) {
        const double* row = logprobs.row(t);
        for (std::size_t s = 0; s < L; ++s) {
            double acc = alpha[s];
            if (s >= 1) acc = log_sum_exp2(acc, alpha[s - 1]);
            if (s >= 2 && labels[s] != kBlank && labels[s] != labels[s - 2]) {
                acc = log_sum_exp2(acc, alpha[s - 2]);
            }
            next[s] = (acc == kNegInf) ? kNegInf : acc + row[labels[s]];
        }
        std::swap(alpha, next);
    }

    double result = alpha[L - 1];
    if (L > 1) result = log_sum_exp2(result, alpha[L - 2]);
    return result;
}

double brute_force_log_likelihood(const LogitMatrix& logprobs, const Phrase& p,
                                  std::span<const int> symbols) {
    if (logprobs.frames() == 0) {
        throw_error(ErrorCode::InvalidArgument, "logit matrix must have at least one frame");
    }
    check_rows_normalized(logprobs);
    if (symbols.empty()) {
        throw_error(ErrorCode::InvalidArgument, "symbol subset must be non-empty");
    }
    const std::size_t T = logprobs.frames();
    const std::size_t V = symbols.size();

    double paths = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
        paths *= static_cast<double>(V);
        if (paths > static_cast<double>(1u << 24)) {
            throw_error(ErrorCode::InvalidArgument,
                        "instance too large for brute-force enumeration");
        }
    }

    // Streaming log-sum-exp over matching paths.
    double running_max = kNegInf;
    double running_sum = 0.0;

    std::vector<std::size_t> odometer(T, 0);
    std::vector<int> path(T);
    while (true) {
        double logp = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            path[t] = symbols[odometer[t]];
            logp += logprobs.at(t, path[t]);
        }
        if (logp != kNegInf && collapse(path) == p) {
            if (logp > running_max) {
                running_sum = running_sum * std::exp(running_max - logp) + 1.0;
                running_max = logp;
            } else {
                running_sum += std::exp(logp - running_max);
            }
        }

        std::size_t t = 0;
        while (t < T && ++odometer[t] == V) {
            odometer[t] = 0;
            ++t;
        }
        if (t == T) break;
    }

    if (running_max == kNegInf) return kNegInf;
    return running_max + std::log(running_sum);
}

double brute_force_log_likelihood(const LogitMatrix& logprobs, const Phrase& p) {
    std::array<int, kAlphabetSize> all{};
    for (int s = 0; s < kAlphabetSize; ++s) all[s] = s;
    return brute_force_log_likelihood(logprobs, p, all);
}

double ctc_loss(const LogitMatrix& logits, const Phrase& p) {
    const double ll = ctc_log_likelihood(log_softmax(logits), p);
    if (ll == kNegInf) return std::numeric_limits<double>::infinity();
    return -ll;
}

std::vector<int> argmax_path(const LogitMatrix& logits) {
    std::vector<int> path(logits.frames());
    for (std::size_t t = 0; t < logits.frames(); ++t) {
        const double* row = logits.row(t);
        int best = 0;
        for (int s = 1; s < kAlphabetSize; ++s) {
            if (row[s] > row[best]) best = s;
        }
        path[t] = best;
    }
    return path;
}

Phrase greedy_decode(const LogitMatrix& logits) { return collapse(argmax_path(logits)); }

}  // namespace bba::ctc
