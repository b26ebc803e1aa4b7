#include "metrics.hpp"

#include <algorithm>
#include <vector>

#include "errors.hpp"

namespace bba::metrics {

std::size_t levenshtein(const std::string& a, const std::string& b) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    if (n == 0) return m;
    if (m == 0) return n;

    std::vector<std::size_t> prev(m + 1);
    std::vector<std::size_t> curr(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;

    for (std::size_t i = 1; i <= n; ++i) {
        curr[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t cost = (a[i - 1] == b[j - 1]) ? 0 : 1;
            curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + cost});
        }
        std::swap(prev, curr);
    }
    return prev[m];
}

double target_similarity(const ctc::Phrase& decoded, const ctc::Phrase& target,
                         const ctc::Phrase& original_decoded) {
    if (original_decoded.empty()) {
        throw_error(ErrorCode::InvalidArgument,
                    "target_similarity: original transcription is empty");
    }
    const double distance = static_cast<double>(levenshtein(decoded.text(), target.text()));
    const double ratio = 1.0 - distance / static_cast<double>(original_decoded.size());
    return std::clamp(ratio, 0.0, 1.0);
}

}  // namespace bba::metrics
