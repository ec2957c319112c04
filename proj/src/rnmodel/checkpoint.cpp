#include "netxfer/rnmodel/checkpoint.hpp"

#include <fstream>

#include "netxfer/errors.hpp"
#include "netxfer/ndiff/checkpoint.hpp"

namespace netxfer::rnmodel {

nlohmann::json model_to_json(const Model& model) {
  return {{"schema-version", kModelSchema},
          {"hyperparameters", model_config_to_json(model.config())},
          {"normalizer", dataio::normalizer_to_json(model.normalizer())},
          {"parameters", ndiff::params_to_json(model.params())}};
}

Model model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema-version") != kModelSchema)
      throw ConfigError("checkpoint: unsupported schema " + j.at("schema-version").dump());
    Model model(model_config_from_json(j.at("hyperparameters")), dataio::normalizer_from_json(j.at("normalizer")));
    ndiff::load_params_json(model.params(), j.at("parameters"));
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << model_to_json(model).dump() << '\n';
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read checkpoint " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace netxfer::rnmodel
