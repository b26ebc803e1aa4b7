#include "audio_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "errors.hpp"

namespace bba::audio {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void write_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u16(std::ofstream& out, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

std::int16_t quantize_sample(double value) {
    double rounded = std::round(value);
    if (rounded < -32768.0) rounded = -32768.0;
    if (rounded > 32767.0) rounded = 32767.0;
    return static_cast<std::int16_t>(rounded);
}

AudioBuffer read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw_error(ErrorCode::Io, "cannot open wav file: " + path);
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw_error(ErrorCode::Format, "not a RIFF/WAVE file: " + path);
    }

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t sample_rate = 0;
    const unsigned char* data = nullptr;
    std::uint32_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t size = read_u32(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (size < 16 || body + 16 > bytes.size()) {
                throw_error(ErrorCode::Format, "truncated fmt chunk: " + path);
            }
            format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            sample_rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            if (body + size > bytes.size()) {
                throw_error(ErrorCode::Format, "truncated data chunk: " + path);
            }
            data = bytes.data() + body;
            data_size = size;
        }
        pos = body + size + (size & 1);  // chunks are word-aligned
    }

    if (!have_fmt || data == nullptr) {
        throw_error(ErrorCode::Format, "missing fmt or data chunk: " + path);
    }
    if (format != 1) {
        throw_error(ErrorCode::Unsupported, "non-PCM encoding (format tag " +
                                                std::to_string(format) + "): " + path);
    }
    if (channels != 1) {
        throw_error(ErrorCode::Unsupported,
                    "expected mono, got " + std::to_string(channels) + " channels: " + path);
    }
    if (bits != 16) {
        throw_error(ErrorCode::Unsupported,
                    "expected 16-bit samples, got " + std::to_string(bits) + "-bit: " + path);
    }
    if (data_size % 2 != 0) {
        throw_error(ErrorCode::Format, "odd data chunk size: " + path);
    }

    AudioBuffer buffer;
    buffer.sample_rate = static_cast<int>(sample_rate);
    const std::size_t n = data_size / 2;
    buffer.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int16_t v =
            static_cast<std::int16_t>(data[2 * i] | (data[2 * i + 1] << 8));
        buffer.samples[i] = static_cast<double>(v);
    }
    return buffer;
}

void write_wav(const AudioBuffer& buffer, const std::string& path) {
    if (buffer.empty()) {
        throw_error(ErrorCode::InvalidArgument, "refusing to write empty buffer: " + path);
    }
    for (double v : buffer.samples) {
        if (!std::isfinite(v)) {
            throw_error(ErrorCode::InvalidArgument, "non-finite sample in buffer: " + path);
        }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw_error(ErrorCode::Io, "cannot open for writing: " + path);
    }

    const std::uint32_t data_size = static_cast<std::uint32_t>(buffer.size() * 2);
    out.write("RIFF", 4);
    write_u32(out, 36 + data_size);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    write_u32(out, 16);
    write_u16(out, 1);  // PCM
    write_u16(out, 1);  // mono
    write_u32(out, static_cast<std::uint32_t>(buffer.sample_rate));
    write_u32(out, static_cast<std::uint32_t>(buffer.sample_rate) * 2);  // byte rate
    write_u16(out, 2);   // block align
    write_u16(out, 16);  // bits per sample
    out.write("data", 4);
    write_u32(out, data_size);
    for (double v : buffer.samples) {
        const std::int16_t q = quantize_sample(v);
        write_u16(out, static_cast<std::uint16_t>(q));
    }
    if (!out) {
        throw_error(ErrorCode::Io, "write failed: " + path);
    }
}

}  // namespace bba::audio
