#pragma once

#include "json.hpp"
#include "netxfer/ndiff/param_store.hpp"

namespace netxfer::ndiff {

// {name: {"shape": [...], "block": "...", "values": [...]}}. Doubles are written
// in shortest round-trip form, so a write/read cycle is bit-exact.
nlohmann::json params_to_json(const ParamStore& store);

// Fills values of an already-built store. Every parameter must be present with
// the same shape and block; extra names are rejected. Throws ConfigError.
void load_params_json(ParamStore& store, const nlohmann::json& j);

}  // namespace netxfer::ndiff
