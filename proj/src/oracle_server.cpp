#include "oracle_server.hpp"

#include <httplib.h>

#include <json.hpp>

#include "errors.hpp"
#include "wire.hpp"

namespace bba::victim {

struct OracleServer::Impl {
    explicit Impl(const ToyVictimParams& params) : oracle(params) { install_routes(); }

    void install_routes() {
        server.Post("/score", [this](const httplib::Request& req, httplib::Response& res) {
            try {
                const wire::ScoreRequest parsed = wire::decode_score_request(req.body);
                const OracleResponse out = oracle.score(parsed.audio, parsed.target);
                res.status = 200;
                res.set_content(wire::encode_score_response(out), "application/json");
            } catch (const Error& e) {
                const bool bad_request = e.code() == ErrorCode::Protocol ||
                                         e.code() == ErrorCode::InvalidArgument;
                res.status = bad_request ? 400 : 500;
                nlohmann::json j;
                j["error"] = e.what();
                res.set_content(j.dump(), "application/json");
            } catch (const std::exception& e) {
                res.status = 500;
                nlohmann::json j;
                j["error"] = e.what();
                res.set_content(j.dump(), "application/json");
            }
        });
        server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            res.status = 200;
            res.set_content("{\"status\":\"ok\"}", "application/json");
        });
    }

    ToyOracle oracle;
    httplib::Server server;
};

OracleServer::OracleServer(const ToyVictimParams& params)
    : impl_(std::make_unique<Impl>(params)) {}

OracleServer::~OracleServer() { stop(); }

int OracleServer::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
        if (bound <= 0) {
            throw_error(ErrorCode::Io, "failed to bind oracle server on " + host);
        }
    } else {
        if (!impl_->server.bind_to_port(host, port)) {
            throw_error(ErrorCode::Io,
                        "failed to bind oracle server on " + host + ":" + std::to_string(port));
        }
    }
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void OracleServer::serve(const std::string& host, int port) {
    if (!impl_->server.listen(host, port)) {
        throw_error(ErrorCode::Io,
                    "failed to serve on " + host + ":" + std::to_string(port));
    }
}

void OracleServer::stop() {
    if (impl_ && impl_->server.is_running()) {
        impl_->server.stop();
    }
    if (thread_.joinable()) {
        thread_.join();
    }
}

}  // namespace bba::victim
