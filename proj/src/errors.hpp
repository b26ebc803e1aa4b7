#pragma once

#include <stdexcept>
#include <string>

namespace bba {

// Error categories shared with the C API status codes (see include/bba.h).
enum class ErrorCode {
    InvalidArgument = 1,
    Io = 2,
    Format = 3,
    Unsupported = 4,
    Remote = 5,
    Protocol = 6,
    Timeout = 7,
    Oracle = 8,
    Internal = 9,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // Set on transport-level failures where a retry may succeed.
    bool retryable() const noexcept { return retryable_; }
    Error& set_retryable(bool value) {
        retryable_ = value;
        return *this;
    }

private:
    ErrorCode code_;
    bool retryable_ = false;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace bba
