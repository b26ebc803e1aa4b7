#include "config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace bba::config {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& context) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (item.key() == k) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw_error(ErrorCode::InvalidArgument,
                        "unknown config key " + context + "'" + item.key() + "'");
        }
    }
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception&) {
            throw_error(ErrorCode::InvalidArgument,
                        std::string("config key '") + key + "' has the wrong type");
        }
    }
}

}  // namespace

attack::AttackConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw_error(ErrorCode::Format, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw_error(ErrorCode::Format, "config must be a JSON object");
    }
    reject_unknown_keys(j,
                        {"population_size", "max_iters", "elite_frac",
                         "phase_switch_edit_distance", "mutation_p_init", "alpha", "beta",
                         "p_max", "noise", "fd_indices", "fd_delta", "fd_step", "seed"},
                        "");

    attack::AttackConfig cfg;
    read_field(j, "population_size", cfg.population_size);
    read_field(j, "max_iters", cfg.max_iters);
    read_field(j, "elite_frac", cfg.elite_frac);
    read_field(j, "phase_switch_edit_distance", cfg.phase_switch_edit_distance);
    read_field(j, "mutation_p_init", cfg.mutation_p_init);
    read_field(j, "alpha", cfg.alpha);
    read_field(j, "beta", cfg.beta);
    read_field(j, "p_max", cfg.p_max);
    read_field(j, "fd_indices", cfg.fd_indices);
    read_field(j, "fd_delta", cfg.fd_delta);
    read_field(j, "fd_step", cfg.fd_step);
    read_field(j, "seed", cfg.seed);
    if (j.contains("noise")) {
        const json& n = j.at("noise");
        if (!n.is_object()) {
            throw_error(ErrorCode::InvalidArgument, "config key 'noise' must be an object");
        }
        reject_unknown_keys(n, {"mu", "sigma", "seed"}, "noise.");
        read_field(n, "mu", cfg.noise.mu);
        read_field(n, "sigma", cfg.noise.sigma);
        read_field(n, "seed", cfg.noise.seed);
    }

    attack::validate_config(cfg);
    return cfg;
}

attack::AttackConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw_error(ErrorCode::Io, "cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_to_json(const attack::AttackConfig& cfg) {
    json j;
    j["population_size"] = cfg.population_size;
    j["max_iters"] = cfg.max_iters;
    j["elite_frac"] = cfg.elite_frac;
    j["phase_switch_edit_distance"] = cfg.phase_switch_edit_distance;
    j["mutation_p_init"] = cfg.mutation_p_init;
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["p_max"] = cfg.p_max;
    j["noise"] = {{"mu", cfg.noise.mu}, {"sigma", cfg.noise.sigma}, {"seed", cfg.noise.seed}};
    j["fd_indices"] = cfg.fd_indices;
    j["fd_delta"] = cfg.fd_delta;
    j["fd_step"] = cfg.fd_step;
    j["seed"] = cfg.seed;
    return j.dump(2);
}

}  // namespace bba::config
