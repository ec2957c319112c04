#pragma once

#include <filesystem>

#include "json.hpp"
#include "netxfer/rnmodel/model.hpp"

namespace netxfer::rnmodel {

inline constexpr const char* kModelSchema = "netxfer-model/1";

// {"schema-version", "hyperparameters", "normalizer", "parameters"}.
// Round trips are bit-exact.
nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);  // ConfigError on schema or shape mismatch

void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace netxfer::rnmodel
