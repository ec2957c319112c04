#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "netxfer/dataio/normalizer.hpp"
#include "netxfer/dataio/windows.hpp"

namespace netxfer::rnmodel {

// Normalized model inputs for one window.
struct PreparedWindow {
  std::vector<std::size_t> active;  // flow indices with at least one delivered packet
  std::vector<std::vector<double>> flow_features;  // aligned with active
  std::vector<double> targets;                     // seconds, aligned with active
  std::vector<std::vector<double>> link_features;
  std::vector<std::vector<double>> queue_features;
};

struct PreparedScenario {
  std::uint64_t scenario_id = 0;
  dataio::ScenarioGraph graph;
  std::vector<PreparedWindow> windows;

  std::size_t active_count() const;
};

PreparedScenario prepare(const dataio::WindowedScenario& ws, const dataio::Normalizer& normalizer);
std::vector<PreparedScenario> prepare_all(std::span<const dataio::WindowedScenario> scenarios,
                                          const dataio::Normalizer& normalizer);

}  // namespace netxfer::rnmodel
