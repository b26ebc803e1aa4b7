#pragma once

#include "audio_io.hpp"
#include "phrase.hpp"

namespace bba {

// What a scoring query returns: the CTC loss of the target under the model
// (finite iff the target is alignable within the model's frame count) and the
// model's greedy transcript of the audio.
struct OracleResponse {
    double loss = 0.0;
    ctc::Phrase transcript;
};

// The black-box boundary. The attack engine sees nothing but this interface;
// implementations must be pure in (audio, target) and safe to call from
// multiple threads.
class Oracle {
public:
    virtual ~Oracle() = default;
    virtual OracleResponse score(const audio::AudioBuffer& audio,
                                 const ctc::Phrase& target) const = 0;
};

}  // namespace bba
