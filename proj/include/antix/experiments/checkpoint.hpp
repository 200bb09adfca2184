#pragma once

#include "antix/rnd/rnd.hpp"
#include "antix/sac/agent.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace antix::experiments {

/// Component name, spec echo, named tensors, rng state and step count,
/// stored in the dataset container format.
struct Checkpoint {
  std::string component;
  nlohmann::json spec;
  std::vector<std::pair<std::string, Matrix>> tensors;
  std::string rng_state;
  std::int64_t step = 0;

  const Matrix& tensor(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json to_json(const nets::NetSpec& spec);
nets::NetSpec net_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const sac::SacConfig& config);
sac::SacConfig sac_config_from_json(const nlohmann::json& j);

std::string rng_state(const Rng& rng);
void restore_rng(Rng& rng, const std::string& state);

Checkpoint checkpoint_rnd(const rnd::RndModel& model);
rnd::RndModel restore_rnd(const Checkpoint& ckpt);

Checkpoint checkpoint_policy(sac::Policy& policy, const sac::TemperatureState& temp);
sac::Policy restore_policy(const Checkpoint& ckpt, sac::TemperatureState* temp = nullptr);

/// Full training state, including optimizer moments and the caller's rng.
Checkpoint checkpoint_agent(sac::SacAgent& agent, const Rng& rng);
sac::SacAgent restore_agent(const Checkpoint& ckpt, Rng* rng = nullptr);

}  // namespace antix::experiments
