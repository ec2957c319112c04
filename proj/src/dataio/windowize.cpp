#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "netxfer/dataio/windows.hpp"
#include "netxfer/errors.hpp"

namespace netxfer::dataio {

ScenarioGraph ScenarioGraph::from(const netsim::Scenario& scenario) {
  ScenarioGraph g;
  std::unordered_map<std::uint32_t, std::size_t> link_index, queue_index;
  for (const auto& l : scenario.topology.links) {
    link_index.emplace(l.id, g.links.size());
    g.links.push_back(GraphLink{l.id, l.src, l.dst, l.capacity_bps, l.propagation_s});
  }
  for (const auto& q : scenario.topology.queues) {
    queue_index.emplace(q.id, g.queues.size());
    const double buffer = q.buffer_packets == netsim::kUnlimitedBuffer ? std::numeric_limits<double>::infinity()
                                                                       : static_cast<double>(q.buffer_packets);
    g.queues.push_back(GraphQueue{q.id, link_index.at(q.link), buffer});
  }
  for (const auto& f : scenario.flows) {
    GraphFlow gf{f.id, {}};
    for (std::uint32_t q : f.path) gf.path.push_back(queue_index.at(q));
    g.flows.push_back(std::move(gf));
  }
  return g;
}

std::size_t WindowedScenario::active_count() const {
  return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [](const WindowSample& s) { return s.active(); }));
}

std::uint64_t WindowedScenario::packet_total() const {
  std::uint64_t total = 0;
  for (const auto& s : samples) total += s.packet_count;
  return total;
}

std::vector<LinkFeatures> WindowedScenario::link_features(std::size_t window) const {
  std::vector<double> bits(graph.links.size(), 0.0);
  for (std::size_t f = 0; f < num_flows(); ++f) {
    const double bw = at(window, f).features[kAvgBandwidth];
    for (std::size_t q : graph.flows[f].path) bits[graph.queues[q].link] += bw;
  }
  std::vector<LinkFeatures> out(graph.links.size());
  for (std::size_t l = 0; l < graph.links.size(); ++l)
    out[l] = {graph.links[l].capacity_bps, graph.links[l].propagation_s, bits[l] / graph.links[l].capacity_bps};
  return out;
}

std::vector<QueueFeatures> WindowedScenario::queue_features(std::size_t window) const {
  const auto links = link_features(window);
  std::vector<QueueFeatures> out(graph.queues.size());
  for (std::size_t q = 0; q < graph.queues.size(); ++q) {
    const double buffer = graph.queues[q].buffer_packets;
    // Unlimited buffers are encoded as a large finite size to keep features finite.
    out[q] = {std::isinf(buffer) ? 1e6 : buffer, links[graph.queues[q].link][2]};
  }
  return out;
}

WindowedScenario windowize(const netsim::PacketTrace& trace, const netsim::Scenario& scenario, double window_length) {
  if (!(window_length > 0.0)) throw ConfigError("windowize: window length must be > 0");
  WindowedScenario ws;
  ws.scenario_id = scenario.id;
  ws.window_length = window_length;
  ws.duration = scenario.duration;
  ws.graph = ScenarioGraph::from(scenario);
  ws.num_windows = static_cast<std::size_t>(std::ceil(scenario.duration / window_length - 1e-12));
  ws.num_windows = std::max<std::size_t>(ws.num_windows, 1);
  const std::size_t flows = ws.num_flows();
  ws.samples.resize(ws.num_windows * flows);

  std::unordered_map<std::uint32_t, std::size_t> flow_index;
  for (std::size_t f = 0; f < flows; ++f) flow_index.emplace(ws.graph.flows[f].id, f);

  std::vector<double> bytes(ws.samples.size(), 0.0), delay_sum(ws.samples.size(), 0.0);
  std::vector<std::uint64_t> sent(ws.samples.size(), 0);
  for (const auto& p : trace.packets) {
    auto w = static_cast<std::size_t>(std::floor(p.send_time / window_length));
    w = std::min(w, ws.num_windows - 1);
    const std::size_t slot = w * flows + flow_index.at(p.flow);
    bytes[slot] += p.size;
    ++sent[slot];
    if (!p.dropped) {
      delay_sum[slot] += p.arrival_time - p.send_time;
      ++ws.samples[slot].packet_count;
    }
  }

  for (std::size_t w = 0; w < ws.num_windows; ++w) {
    const double elapsed = std::min(window_length, scenario.duration - static_cast<double>(w) * window_length);
    for (std::size_t f = 0; f < flows; ++f) {
      const std::size_t slot = w * flows + f;
      WindowSample& s = ws.samples[slot];
      s.scenario_id = scenario.id;
      s.window = static_cast<std::uint32_t>(w);
      s.flow = ws.graph.flows[f].id;
      if (sent[slot] > 0) {
        s.features[kAvgBandwidth] = bytes[slot] * 8.0 / elapsed;
        s.features[kPacketRate] = static_cast<double>(sent[slot]) / elapsed;
        s.features[kMeanPacketSize] = bytes[slot] / static_cast<double>(sent[slot]);
        s.features[kPathLength] = static_cast<double>(ws.graph.flows[f].path.size());
      }
      if (s.packet_count > 0) s.target = delay_sum[slot] / static_cast<double>(s.packet_count);
    }
  }
  return ws;
}

}  // namespace netxfer::dataio
