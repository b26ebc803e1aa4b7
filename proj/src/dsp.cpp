#include "dsp.hpp"

#include <cmath>

#include "errors.hpp"

namespace bba::dsp {

BiquadCoeffs design_highpass(int sample_rate, double cutoff) {
    if (sample_rate <= 0) {
        throw_error(ErrorCode::InvalidArgument, "sample rate must be positive");
    }
    const double nyquist = sample_rate / 2.0;
    if (!(cutoff > 0.0) || !(cutoff < nyquist)) {
        throw_error(ErrorCode::InvalidArgument,
                    "cutoff must lie in (0, sample_rate/2), got " + std::to_string(cutoff));
    }

    // Analog prototype s^2 / (s^2 + sqrt(2) s + 1), prewarped.
    const double k = std::tan(M_PI * cutoff / sample_rate);
    const double k2 = k * k;
    const double norm = 1.0 / (1.0 + std::sqrt(2.0) * k + k2);

    BiquadCoeffs c;
    c.b0 = norm;
    c.b1 = -2.0 * norm;
    c.b2 = norm;
    c.a1 = 2.0 * (k2 - 1.0) * norm;
    c.a2 = (1.0 - std::sqrt(2.0) * k + k2) * norm;
    return c;
}

std::vector<double> apply_filter(const BiquadCoeffs& coeffs, const std::vector<double>& signal) {
    std::vector<double> out(signal.size());
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t i = 0; i < signal.size(); ++i) {
        const double x = signal[i];
        const double y = coeffs.b0 * x + s1;
        s1 = coeffs.b1 * x - coeffs.a1 * y + s2;
        s2 = coeffs.b2 * x - coeffs.a2 * y;
        out[i] = y;
    }
    return out;
}

std::vector<double> sample_noise(std::size_t n, const NoiseConfig& cfg, Rng& rng) {
    if (cfg.sigma < 0.0) {
        throw_error(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = rng.gaussian(cfg.mu, cfg.sigma);
    }
    return out;
}

std::vector<double> sample_noise(std::size_t n, const NoiseConfig& cfg) {
    Rng rng(cfg.seed);
    return sample_noise(n, cfg, rng);
}

double cross_correlation(const audio::AudioBuffer& a, const audio::AudioBuffer& b) {
    if (a.size() != b.size()) {
        throw_error(ErrorCode::InvalidArgument, "cross_correlation: length mismatch");
    }
    const std::size_t n = a.size();
    if (n < 2) {
        throw_error(ErrorCode::InvalidArgument, "cross_correlation: need at least 2 samples");
    }

    double mean_a = 0.0;
    double mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += a.samples[i];
        mean_b += b.samples[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);

    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a.samples[i] - mean_a;
        const double db = b.samples[i] - mean_b;
        dot += da * db;
        norm_a += da * da;
        norm_b += db * db;
    }
    if (norm_a == 0.0 || norm_b == 0.0) {
        throw_error(ErrorCode::InvalidArgument, "cross_correlation: constant input");
    }
    double r = dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;
    return r;
}

}  // namespace bba::dsp
