#pragma once

#include <string>

#include "audio_io.hpp"
#include "oracle.hpp"
#include "phrase.hpp"

namespace bba::wire {

// Request/response encoding for the HTTP scoring protocol.
//
// Request:  {"audio_b64": <base64 of little-endian int16 PCM, round+clamp>,
//            "sample_rate": <int>, "target": <text>}
// Response: {"loss": <number or "inf">, "transcript": <text>}

std::string base64_encode(const std::string& bytes);
std::string base64_decode(const std::string& encoded);  // throws on bad input

std::string encode_score_request(const audio::AudioBuffer& audio, const ctc::Phrase& target);

struct ScoreRequest {
    audio::AudioBuffer audio;
    ctc::Phrase target;
};
ScoreRequest decode_score_request(const std::string& body);

std::string encode_score_response(const OracleResponse& response);
OracleResponse decode_score_response(const std::string& body);

}  // namespace bba::wire
