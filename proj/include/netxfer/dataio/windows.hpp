#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "netxfer/netsim/scenario.hpp"
#include "netxfer/netsim/simulator.hpp"

namespace netxfer::dataio {

inline constexpr double kDefaultWindowLength = 0.1;

inline constexpr std::size_t kFlowFeatureCount = 4;
inline constexpr std::size_t kLinkFeatureCount = 3;
inline constexpr std::size_t kQueueFeatureCount = 2;

using FlowFeatures = std::array<double, kFlowFeatureCount>;
using LinkFeatures = std::array<double, kLinkFeatureCount>;
using QueueFeatures = std::array<double, kQueueFeatureCount>;

// Flow feature layout.
enum FlowFeature : std::size_t { kAvgBandwidth = 0, kPacketRate = 1, kMeanPacketSize = 2, kPathLength = 3 };

struct WindowSample {
  std::uint64_t scenario_id = 0;
  std::uint32_t window = 0;
  std::uint32_t flow = 0;  // flow id
  // Offered traffic in the window: bits/s, packets/s, bytes, hops.
  FlowFeatures features{};
  double target = 0.0;  // mean delay of delivered packets, s; 0 when inactive
  std::uint64_t packet_count = 0;  // delivered packets sent in this window

  bool active() const { return packet_count > 0; }
};

struct GraphLink {
  std::uint32_t id = 0;
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  double capacity_bps = 0.0;
  double propagation_s = 0.0;
};

struct GraphQueue {
  std::uint32_t id = 0;
  std::size_t link = 0;  // index into ScenarioGraph::links
  double buffer_packets = 0.0;  // infinity for unlimited buffers
};

struct GraphFlow {
  std::uint32_t id = 0;
  std::vector<std::size_t> path;  // indices into ScenarioGraph::queues
};

// Index-based view of a scenario's static structure.
struct ScenarioGraph {
  std::vector<GraphLink> links;
  std::vector<GraphQueue> queues;
  std::vector<GraphFlow> flows;

  static ScenarioGraph from(const netsim::Scenario& scenario);
};

struct WindowedScenario {
  std::uint64_t scenario_id = 0;
  double window_length = kDefaultWindowLength;
  double duration = 0.0;
  ScenarioGraph graph;
  std::size_t num_windows = 0;
  // Row-major W x F grid: every flow has a slot in every window.
  std::vector<WindowSample> samples;

  std::size_t num_flows() const { return graph.flows.size(); }
  const WindowSample& at(std::size_t window, std::size_t flow) const { return samples[window * num_flows() + flow]; }
  WindowSample& at(std::size_t window, std::size_t flow) { return samples[window * num_flows() + flow]; }
  std::size_t active_count() const;
  std::uint64_t packet_total() const;

  // Capacity, propagation and offered load (sum of flow bandwidth / capacity) per link.
  std::vector<LinkFeatures> link_features(std::size_t window) const;
  // Buffer size and offered load of the queue's link.
  std::vector<QueueFeatures> queue_features(std::size_t window) const;
};

// Packet with send time t lands in window floor(t / window_length). Features
// cover every sent packet; targets and counts only delivered ones. The final
// partial window divides by its real elapsed time.
WindowedScenario windowize(const netsim::PacketTrace& trace, const netsim::Scenario& scenario,
                           double window_length = kDefaultWindowLength);

}  // namespace netxfer::dataio
