#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "mvver/harness.hpp"

namespace mvver {

inline constexpr int kConfigVersion = 1;

nlohmann::json to_json(const ClassifierConfig& cfg);
ClassifierConfig classifier_from_json(const nlohmann::json& j,
                                      const ClassifierConfig& defaults = {});

nlohmann::json to_json(const RefineConfig& cfg);
RefineConfig refine_from_json(const nlohmann::json& j, const RefineConfig& defaults = {});

nlohmann::json to_json(const IterationReport& r);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Unknown keys are rejected so typos do not silently fall back to defaults.
ExperimentConfig experiment_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace mvver
