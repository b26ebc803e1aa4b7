#pragma once

#include <memory>
#include <string>
#include <thread>

#include "victim.hpp"

namespace bba::victim {

// Serves a toy victim over the HTTP scoring protocol (POST /score, plus
// GET /health for readiness checks).
class OracleServer {
public:
    explicit OracleServer(const ToyVictimParams& params);
    ~OracleServer();

    OracleServer(const OracleServer&) = delete;
    OracleServer& operator=(const OracleServer&) = delete;

    // Binds and serves on a background thread; returns the bound port.
    // port 0 picks a free port.
    int start(const std::string& host, int port);

    // Binds and serves on the calling thread until stop() is called from
    // elsewhere or the process exits.
    void serve(const std::string& host, int port);

    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
};

}  // namespace bba::victim
