// oracle CLI: serves the bundled toy speech-to-text model over HTTP.
//
//   oracle serve --seed 7 --port 8300
//
// POST /score with {"audio_b64": ..., "sample_rate": ..., "target": ...}
// returns {"loss": <number or "inf">, "transcript": ...}.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "bba.h"

int main(int argc, char** argv) {
    CLI::App app{"Toy speech-to-text oracle"};
    app.require_subcommand(1);

    auto* serve = app.add_subcommand("serve", "Serve the toy oracle over HTTP");
    std::uint64_t seed = 0;
    int port = 8300;
    std::string host = "127.0.0.1";
    serve->add_option("--seed", seed, "Seed of the toy model's weights")
        ->capture_default_str();
    serve->add_option("--port", port, "Port to listen on")->capture_default_str();
    serve->add_option("--host", host, "Address to bind")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    std::printf("serving toy oracle (seed %llu) on http://%s:%d/score\n",
                static_cast<unsigned long long>(seed), host.c_str(), port);
    std::fflush(stdout);
    if (bba_oracle_serve(seed, host.c_str(), port) != BBA_OK) {
        std::fprintf(stderr, "error: %s\n", bba_last_error());
        return 1;
    }
    return 0;
}
