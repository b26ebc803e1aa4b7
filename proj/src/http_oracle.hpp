#pragma once

#include <chrono>
#include <string>

#include "oracle.hpp"

namespace bba::victim {

// Client side of the HTTP scoring protocol. Retryable failures (connection
// errors, timeouts, 5xx) are retried up to `retries` extra attempts; protocol
// errors and 4xx are reported immediately. A fresh connection is used per
// request, so concurrent calls are safe.
class HttpOracle : public Oracle {
public:
    HttpOracle(std::string endpoint, std::chrono::milliseconds timeout, int retries);

    OracleResponse score(const audio::AudioBuffer& audio,
                         const ctc::Phrase& target) const override;

private:
    std::string host_;  // scheme://host:port
    std::string path_;
    std::chrono::milliseconds timeout_;
    int retries_;
};

}  // namespace bba::victim
