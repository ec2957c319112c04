#pragma once

#include <vector>

#include "netxfer/dataio/windows.hpp"
#include "netxfer/netsim/generator.hpp"
#include "netxfer/netsim/rng.hpp"
#include "netxfer/netsim/simulator.hpp"
#include "netxfer/rnmodel/model.hpp"

namespace netxfer::testing {

inline netsim::ScenarioTemplate tiny_template(double duration = 0.5) {
  netsim::ScenarioTemplate t;
  t.min_nodes = 4;
  t.max_nodes = 5;
  t.min_flows = 3;
  t.max_flows = 4;
  t.min_duration_s = duration;
  t.max_duration_s = duration;
  return t;
}

inline std::vector<dataio::WindowedScenario> windowed(const netsim::ScenarioTemplate& t, std::size_t count,
                                                      std::uint64_t seed) {
  std::vector<dataio::WindowedScenario> out;
  for (const auto& s : netsim::gen_scenarios(t, count, seed)) out.push_back(dataio::windowize(netsim::simulate(s), s));
  return out;
}

inline rnmodel::ModelConfig tiny_config(std::size_t d = 4, std::size_t iterations = 2) {
  rnmodel::ModelConfig c;
  c.embedding_dim = d;
  c.mpa_iterations = iterations;
  c.encoder_widths = {5, d};
  c.readout_widths = {3};
  return c;
}

// Hand-built scenario: queue q sits on link q. Every window shares the same
// deterministic pseudo-random features.
inline rnmodel::PreparedScenario hand_built(std::size_t queues, const std::vector<std::vector<std::size_t>>& paths,
                                            std::size_t windows, std::uint64_t seed = 3) {
  rnmodel::PreparedScenario s;
  for (std::size_t q = 0; q < queues; ++q) {
    s.graph.links.push_back({static_cast<std::uint32_t>(q), 0, 1, 1e7, 1e-4});
    s.graph.queues.push_back({static_cast<std::uint32_t>(q), q, 1000.0});
  }
  for (std::size_t f = 0; f < paths.size(); ++f) s.graph.flows.push_back({static_cast<std::uint32_t>(f), paths[f]});
  netsim::CounterRng rng(seed, 0);
  auto vec = [&](std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
  };
  rnmodel::PreparedWindow w;
  for (std::size_t f = 0; f < paths.size(); ++f) {
    w.active.push_back(f);
    w.flow_features.push_back(vec(dataio::kFlowFeatureCount));
    w.targets.push_back(rng.uniform(1e-3, 5e-3));
  }
  for (std::size_t q = 0; q < queues; ++q) {
    w.link_features.push_back(vec(dataio::kLinkFeatureCount));
    w.queue_features.push_back(vec(dataio::kQueueFeatureCount));
  }
  s.windows.assign(windows, w);
  return s;
}

}  // namespace netxfer::testing
