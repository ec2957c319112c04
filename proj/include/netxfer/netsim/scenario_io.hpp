#pragma once

#include <filesystem>
#include <iosfwd>

#include "json.hpp"
#include "netxfer/netsim/scenario.hpp"
#include "netxfer/netsim/simulator.hpp"

namespace netxfer::netsim {

inline constexpr const char* kScenarioSchema = "scenario/1";

// Scenario files carry "schema": "scenario/1". Unlimited buffers are written as null.
nlohmann::json scenario_to_json(const Scenario& scenario);
// Replay paths are resolved relative to base_dir when not absolute.
Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

void write_scenario(const std::filesystem::path& path, const Scenario& scenario);
Scenario read_scenario(const std::filesystem::path& path);

nlohmann::json fidelity_to_json(const Fidelity& fidelity);
Fidelity fidelity_from_json(const nlohmann::json& j);

// One packet record per line: {"flow","send","arrival","size","dropped"};
// arrival is null for dropped packets.
void write_trace_ndjson(std::ostream& out, const PacketTrace& trace);
PacketTrace read_trace_ndjson(std::istream& in);

}  // namespace netxfer::netsim
