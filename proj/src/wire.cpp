#include "wire.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include <json.hpp>

#include "errors.hpp"

namespace bba::wire {

namespace {

constexpr char kB64Table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

}  // namespace

std::string base64_encode(const std::string& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= bytes.size()) {
        const std::uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                                (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                                static_cast<unsigned char>(bytes[i + 2]);
        out.push_back(kB64Table[(v >> 18) & 63]);
        out.push_back(kB64Table[(v >> 12) & 63]);
        out.push_back(kB64Table[(v >> 6) & 63]);
        out.push_back(kB64Table[v & 63]);
        i += 3;
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t v = static_cast<unsigned char>(bytes[i]) << 16;
        out.push_back(kB64Table[(v >> 18) & 63]);
        out.push_back(kB64Table[(v >> 12) & 63]);
        out.push_back('=');
        out.push_back('=');
    } else if (rest == 2) {
        const std::uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                                (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out.push_back(kB64Table[(v >> 18) & 63]);
        out.push_back(kB64Table[(v >> 12) & 63]);
        out.push_back(kB64Table[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::string base64_decode(const std::string& encoded) {
    if (encoded.size() % 4 != 0) {
        throw_error(ErrorCode::Protocol, "base64 length not a multiple of 4");
    }
    std::string out;
    out.reserve(encoded.size() / 4 * 3);
    for (std::size_t i = 0; i < encoded.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (int j = 0; j < 4; ++j) {
            const char c = encoded[i + j];
            if (c == '=' && i + 4 == encoded.size() && j >= 2) {
                vals[j] = 0;
                ++pad;
            } else {
                vals[j] = b64_value(c);
                if (vals[j] < 0 || pad > 0) {
                    throw_error(ErrorCode::Protocol, "invalid base64 character");
                }
            }
        }
        const std::uint32_t v = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
        out.push_back(static_cast<char>((v >> 16) & 0xff));
        if (pad < 2) out.push_back(static_cast<char>((v >> 8) & 0xff));
        if (pad < 1) out.push_back(static_cast<char>(v & 0xff));
    }
    return out;
}

std::string encode_score_request(const audio::AudioBuffer& audio, const ctc::Phrase& target) {
    std::string pcm;
    pcm.reserve(audio.size() * 2);
    for (double v : audio.samples) {
        const std::int16_t q = audio::quantize_sample(v);
        pcm.push_back(static_cast<char>(q & 0xff));
        pcm.push_back(static_cast<char>((q >> 8) & 0xff));
    }
    nlohmann::json j;
    j["audio_b64"] = base64_encode(pcm);
    j["sample_rate"] = audio.sample_rate;
    j["target"] = target.text();
    return j.dump();
}

ScoreRequest decode_score_request(const std::string& body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw_error(ErrorCode::Protocol, std::string("malformed request JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("audio_b64") || !j.contains("sample_rate") ||
        !j.contains("target") || !j["audio_b64"].is_string() ||
        !j["sample_rate"].is_number_integer() || !j["target"].is_string()) {
        throw_error(ErrorCode::Protocol, "request missing audio_b64/sample_rate/target");
    }

    const std::string pcm = base64_decode(j["audio_b64"].get<std::string>());
    if (pcm.size() % 2 != 0) {
        throw_error(ErrorCode::Protocol, "audio payload has odd byte count");
    }

    ScoreRequest req;
    req.audio.sample_rate = j["sample_rate"].get<int>();
    if (req.audio.sample_rate <= 0) {
        throw_error(ErrorCode::Protocol, "sample_rate must be positive");
    }
    req.audio.samples.resize(pcm.size() / 2);
    for (std::size_t i = 0; i < req.audio.samples.size(); ++i) {
        const std::int16_t v = static_cast<std::int16_t>(
            static_cast<unsigned char>(pcm[2 * i]) |
            (static_cast<unsigned char>(pcm[2 * i + 1]) << 8));
        req.audio.samples[i] = static_cast<double>(v);
    }
    try {
        req.target = ctc::Phrase(j["target"].get<std::string>());
    } catch (const Error& e) {
        throw_error(ErrorCode::Protocol, std::string("invalid target: ") + e.what());
    }
    return req;
}

std::string encode_score_response(const OracleResponse& response) {
    nlohmann::json j;
    if (std::isinf(response.loss)) {
        j["loss"] = "inf";
    } else {
        j["loss"] = response.loss;
    }
    j["transcript"] = response.transcript.text();
    return j.dump();
}

OracleResponse decode_score_response(const std::string& body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw_error(ErrorCode::Protocol, std::string("malformed response JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("loss") || !j.contains("transcript") ||
        !j["transcript"].is_string()) {
        throw_error(ErrorCode::Protocol, "response missing loss/transcript");
    }

    OracleResponse r;
    if (j["loss"].is_string()) {
        if (j["loss"].get<std::string>() != "inf") {
            throw_error(ErrorCode::Protocol, "loss must be a number or \"inf\"");
        }
        r.loss = std::numeric_limits<double>::infinity();
    } else if (j["loss"].is_number()) {
        r.loss = j["loss"].get<double>();
    } else {
        throw_error(ErrorCode::Protocol, "loss must be a number or \"inf\"");
    }
    try {
        r.transcript = ctc::Phrase(j["transcript"].get<std::string>());
    } catch (const Error& e) {
        throw_error(ErrorCode::Protocol, std::string("invalid transcript: ") + e.what());
    }
    return r;
}

}  // namespace bba::wire
