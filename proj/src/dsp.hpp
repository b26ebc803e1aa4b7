#pragma once

#include <cstdint>
#include <vector>

#include "audio_io.hpp"
#include "rng.hpp"

namespace bba::dsp {

// Second-order section with a0 normalized to 1.
struct BiquadCoeffs {
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
};

struct NoiseConfig {
    double mu = 0.0;
    double sigma = 40.0;  // full-scale 16-bit units
    std::uint64_t seed = 0;
};

// Butterworth highpass (Q = 1/sqrt(2)) via the bilinear transform with
// frequency prewarping, so the -3 dB point lands exactly at `cutoff`.
BiquadCoeffs design_highpass(int sample_rate, double cutoff);

// Direct-form II transposed, zero initial state.
std::vector<double> apply_filter(const BiquadCoeffs& coeffs, const std::vector<double>& signal);

// n i.i.d. draws from N(mu, sigma^2) using the provided generator.
std::vector<double> sample_noise(std::size_t n, const NoiseConfig& cfg, Rng& rng);

// Convenience form seeded from cfg.seed.
std::vector<double> sample_noise(std::size_t n, const NoiseConfig& cfg);

// Zero-lag normalized correlation in [-1, 1]. Requires equal lengths,
// length >= 2, and non-constant inputs.
double cross_correlation(const audio::AudioBuffer& a, const audio::AudioBuffer& b);

}  // namespace bba::dsp
