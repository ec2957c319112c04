#include "netxfer/ndiff/checkpoint.hpp"

#include <string>

#include "netxfer/errors.hpp"

namespace netxfer::ndiff {

nlohmann::json params_to_json(const ParamStore& store) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& p : store) j[p.name] = {{"shape", p.shape}, {"block", to_string(p.block)}, {"values", p.value}};
  return j;
}

void load_params_json(ParamStore& store, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("checkpoint: parameters must be an object");
  if (j.size() != store.size())
    throw ConfigError("checkpoint: expected " + std::to_string(store.size()) + " parameters, found " + std::to_string(j.size()));
  try {
    for (auto& p : store) {
      if (!j.contains(p.name)) throw ConfigError("checkpoint: missing parameter " + p.name);
      const auto& e = j.at(p.name);
      if (e.at("shape").get<std::vector<std::size_t>>() != p.shape) throw ConfigError("checkpoint: shape mismatch for " + p.name);
      if (block_from_string(e.at("block").get<std::string>()) != p.block) throw ConfigError("checkpoint: block mismatch for " + p.name);
      auto values = e.at("values").get<std::vector<double>>();
      if (values.size() != p.size()) throw ConfigError("checkpoint: value count mismatch for " + p.name);
      p.value = std::move(values);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: malformed parameters: ") + e.what());
  }
}

}  // namespace netxfer::ndiff
