#pragma once

#include <string>

#include "attack.hpp"

namespace bba::config {

// JSON config with keys mirroring AttackConfig field names:
//   population_size, max_iters, elite_frac, phase_switch_edit_distance,
//   mutation_p_init, alpha, beta, p_max, noise {mu, sigma, seed},
//   fd_indices, fd_delta, fd_step, seed
// Every key is optional; unknown keys are rejected.
attack::AttackConfig parse_config(const std::string& json_text);
attack::AttackConfig load_config(const std::string& path);
std::string config_to_json(const attack::AttackConfig& config);

}  // namespace bba::config
