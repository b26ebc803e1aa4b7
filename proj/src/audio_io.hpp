#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bba::audio {

// Mono audio held as real-valued samples in full-scale 16-bit units
// ([-32768, 32767]). The attack mutates real values; rounding to integers
// happens only when a buffer is written to disk or serialized for the wire.
struct AudioBuffer {
    std::vector<double> samples;
    int sample_rate = 16000;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

// Reads a RIFF/WAVE file. Only 16-bit mono PCM is accepted; samples are the
// raw integer values converted to double, no scaling.
AudioBuffer read_wav(const std::string& path);

// Writes 16-bit mono PCM. Each sample is rounded to the nearest integer and
// clamped to [-32768, 32767].
void write_wav(const AudioBuffer& buffer, const std::string& path);

// Round-and-clamp used by write_wav and by the wire encoding.
std::int16_t quantize_sample(double value);

}  // namespace bba::audio
