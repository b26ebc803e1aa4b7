#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace testutil {

// |H(e^{j omega})| for a biquad with a0 == 1, evaluated directly on the unit
// circle. Independent check of designed filter responses.
inline double biquad_magnitude(double b0, double b1, double b2, double a1, double a2,
                               double omega) {
    const std::complex<double> z1 = std::polar(1.0, -omega);
    const std::complex<double> z2 = z1 * z1;
    const std::complex<double> num = b0 + b1 * z1 + b2 * z2;
    const std::complex<double> den = 1.0 + a1 * z1 + a2 * z2;
    return std::abs(num / den);
}

// In-place iterative radix-2 FFT; size must be a power of two.
inline void fft(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen = std::polar(1.0, angle);
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Sum of |X_k|^2 over bins whose frequency lies in [f_lo, f_hi).
inline double band_energy(const std::vector<double>& signal, int sample_rate, double f_lo,
                          double f_hi) {
    std::size_t n = 1;
    while (n < signal.size()) n <<= 1;
    std::vector<std::complex<double>> spec(n, 0.0);
    for (std::size_t i = 0; i < signal.size(); ++i) spec[i] = signal[i];
    fft(spec);
    double energy = 0.0;
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const double freq = static_cast<double>(k) * sample_rate / static_cast<double>(n);
        if (freq >= f_lo && freq < f_hi) energy += std::norm(spec[k]);
    }
    return energy;
}

// Unique path under the system temp directory; removed by the caller if it
// matters, leaked otherwise (the OS temp dir is fine with that for tests).
inline std::filesystem::path temp_path(const std::string& stem, const std::string& ext) {
    static std::mt19937_64 rng(std::random_device{}());
    const std::string name = stem + "_" + std::to_string(rng()) + ext;
    return std::filesystem::temp_directory_path() / name;
}

inline std::filesystem::path temp_dir(const std::string& stem) {
    const std::filesystem::path dir = temp_path(stem, "");
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace testutil
