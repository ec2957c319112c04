#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netxfer/netsim/scenario.hpp"

namespace netxfer::netsim {

enum class TrafficKind { Poisson, OnOff, HeavyTail, Replay };

struct SizeTemplate {
  bool exponential = true;
  double mean_bytes = 1000.0;
};

// Ranges the generator samples scenarios from. Ranges are inclusive.
struct ScenarioTemplate {
  int min_nodes = 5;
  int max_nodes = 8;
  // Probability of each extra edge beyond a random spanning tree.
  double extra_edge_probability = 0.25;
  std::vector<double> capacities_bps{10e6, 20e6, 40e6, 100e6};
  double min_propagation_s = 50e-6;
  double max_propagation_s = 500e-6;
  std::uint64_t buffer_packets = kDefaultBuffer;

  int min_flows = 4;
  int max_flows = 8;
  std::vector<TrafficKind> traffic_kinds{TrafficKind::Poisson};
  SizeTemplate packet_size;
  double min_on_mean_s = 0.05;
  double max_on_mean_s = 0.2;
  double min_off_mean_s = 0.05;
  double max_off_mean_s = 0.2;
  double heavy_tail_sigma = 1.0;
  std::string replay_path;  // required when traffic_kinds contains Replay

  // Per-scenario peak link utilization is drawn in [min, max]; never above cap.
  double min_utilization = 0.3;
  double max_utilization = 0.8;
  double utilization_cap = 0.9;

  double min_duration_s = 5.0;
  double max_duration_s = 20.0;

  // When set, every scenario shares the topology drawn from this seed.
  std::optional<std::uint64_t> topology_seed;
  // With a shared topology, also share flow endpoints and routing.
  bool fixed_routing = false;

  Fidelity fidelity = Ideal{};

  // Throws ConfigError naming the violated constraint.
  void validate() const;
};

// Scenario i depends only on (template, seed, i): ids are 0..count-1 and a
// prefix of a longer run is identical to a shorter run.
std::vector<Scenario> gen_scenarios(const ScenarioTemplate& tmpl, std::size_t count, std::uint64_t seed);

Scenario gen_scenario(const ScenarioTemplate& tmpl, std::uint64_t id, std::uint64_t seed);

}  // namespace netxfer::netsim
