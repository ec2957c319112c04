#pragma once

#include "netxfer/netsim/scenario.hpp"

namespace netxfer::testing {

// One link 0 -> 1 with a single flow across it.
inline netsim::Scenario single_link(double capacity_bps, double propagation_s, netsim::TrafficModel traffic, double duration,
                                    std::uint64_t buffer = netsim::kUnlimitedBuffer) {
  netsim::Scenario s;
  s.topology.nodes = {0, 1};
  s.topology.links = {netsim::Link{0, 0, 1, capacity_bps, propagation_s}};
  s.topology.queues = {netsim::Queue{0, 0, buffer}};
  s.flows = {netsim::Flow{0, {0}, std::move(traffic)}};
  s.duration = duration;
  s.seed = 42;
  return s;
}

// Line 0 -> 1 -> ... -> hops, every flow traversing the whole line.
inline netsim::Scenario tandem(int hops, int flows, double capacity_bps, double rate, double duration) {
  netsim::Scenario s;
  for (int i = 0; i <= hops; ++i) s.topology.nodes.push_back(static_cast<std::uint32_t>(i));
  std::vector<std::uint32_t> path;
  for (int i = 0; i < hops; ++i) {
    const auto id = static_cast<std::uint32_t>(i);
    s.topology.links.push_back(netsim::Link{id, id, id + 1, capacity_bps, 100e-6});
    s.topology.queues.push_back(netsim::Queue{id, id, netsim::kUnlimitedBuffer});
    path.push_back(id);
  }
  for (int f = 0; f < flows; ++f)
    s.flows.push_back(netsim::Flow{static_cast<std::uint32_t>(f), path,
                                   netsim::TrafficModel{netsim::Poisson{rate}, netsim::ExponentialSize{1000.0}}});
  s.duration = duration;
  s.seed = 7;
  return s;
}

}  // namespace netxfer::testing
