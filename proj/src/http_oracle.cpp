#include "http_oracle.hpp"

#include <httplib.h>

#include "errors.hpp"
#include "wire.hpp"

namespace bba::victim {

namespace {

Error transport_error(httplib::Error err) {
    const std::string detail = httplib::to_string(err);
    switch (err) {
        case httplib::Error::ConnectionTimeout:
        case httplib::Error::Read:
        case httplib::Error::Write:
            return Error(ErrorCode::Timeout, "oracle request timed out: " + detail)
                .set_retryable(true);
        default:
            return Error(ErrorCode::Remote, "oracle transport failure: " + detail)
                .set_retryable(true);
    }
}

}  // namespace

HttpOracle::HttpOracle(std::string endpoint, std::chrono::milliseconds timeout, int retries)
    : timeout_(timeout), retries_(retries) {
    const std::size_t scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw_error(ErrorCode::InvalidArgument,
                    "oracle endpoint must start with http:// or https://, got: " + endpoint);
    }
    const std::size_t path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        host_ = endpoint;
        path_ = "/score";
    } else {
        host_ = endpoint.substr(0, path_start);
        path_ = endpoint.substr(path_start);
    }
    if (retries_ < 0) {
        throw_error(ErrorCode::InvalidArgument, "retry count must be >= 0");
    }
}

OracleResponse HttpOracle::score(const audio::AudioBuffer& audio,
                                 const ctc::Phrase& target) const {
    const std::string body = wire::encode_score_request(audio, target);

    Error last(ErrorCode::Remote, "unreachable");
    for (int attempt = 0; attempt <= retries_; ++attempt) {
        httplib::Client client(host_);
        client.set_connection_timeout(timeout_);
        client.set_read_timeout(timeout_);
        client.set_write_timeout(timeout_);

        httplib::Result res = client.Post(path_, body, "application/json");
        if (!res) {
            last = transport_error(res.error());
        } else if (res->status != 200) {
            last = Error(ErrorCode::Remote,
                         "oracle returned HTTP " + std::to_string(res->status) + ": " +
                             res->body)
                       .set_retryable(res->status >= 500);
        } else {
            return wire::decode_score_response(res->body);
        }
        if (!last.retryable()) break;
    }
    throw last;
}

}  // namespace bba::victim
