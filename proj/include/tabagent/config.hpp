#pragma once

#include <filesystem>
#include <string>

#include "tabagent/agent/backend.hpp"
#include "tabagent/agent/episode.hpp"
#include "tabagent/agent/executor.hpp"
#include "tabagent/core/serialization.hpp"
#include "tabagent/lab/trainer.hpp"

namespace tabagent {

// Everything a CLI run can be configured with. The file format is one flat
// JSON object; keys are the field names below (sandbox_command is an array of
// strings, mental_accuracy an array of four reals, mode is "rapo" or "grpo").
struct RunConfig {
  lab::TrainRunConfig train;
  agent::EpisodeConfig episode;
  agent::HttpBackendConfig backend;
  agent::SandboxConfig sandbox;
  int parallelism = 1;
};

// Applies the keys of `j` over `cfg`. Unknown keys and ill-typed values throw
// ConfigError; the result is validated.
void apply_config(RunConfig& cfg, const Json& j);
RunConfig load_config(const std::filesystem::path& path);
Json to_json(const RunConfig& cfg);

}  // namespace tabagent
