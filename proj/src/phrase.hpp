#pragma once

#include <string>

#include "errors.hpp"

namespace bba::ctc {

inline bool is_phrase_char(char c) { return (c >= 'a' && c <= 'z') || c == ' '; }

// Text over {a..z, space}. The blank symbol can never appear in a phrase.
class Phrase {
public:
    Phrase() = default;

    explicit Phrase(std::string text) : text_(std::move(text)) {
        for (char c : text_) {
            if (!is_phrase_char(c)) {
                throw_error(ErrorCode::InvalidArgument,
                            std::string("invalid phrase character: '") + c + "'");
            }
        }
    }

    const std::string& text() const { return text_; }
    std::size_t size() const { return text_.size(); }
    bool empty() const { return text_.empty(); }

    bool operator==(const Phrase& other) const { return text_ == other.text_; }
    bool operator!=(const Phrase& other) const { return text_ != other.text_; }

private:
    std::string text_;
};

}  // namespace bba::ctc
