#include "netxfer/netsim/generator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <string>

#include "netxfer/errors.hpp"
#include "netxfer/netsim/rng.hpp"

namespace netxfer::netsim {
namespace {

enum Stream : std::uint64_t { kTopology = 1, kRouting = 2, kTraffic = 3, kTiming = 4 };

CounterRng stream_for(std::uint64_t seed, std::uint64_t id, Stream s) { return CounterRng(seed, id * 16 + s); }

Topology random_topology(const ScenarioTemplate& t, CounterRng rng) {
  const int n = static_cast<int>(rng.integer(t.min_nodes, t.max_nodes));
  Topology topo;
  for (int i = 0; i < n; ++i) topo.nodes.push_back(static_cast<std::uint32_t>(i));

  std::set<std::pair<int, int>> edges;
  for (int i = 1; i < n; ++i) edges.emplace(static_cast<int>(rng.integer(0, i - 1)), i);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!edges.contains({i, j}) && rng.uniform() < t.extra_edge_probability) edges.emplace(i, j);

  std::uint32_t next_id = 0;
  for (auto [a, b] : edges) {
    const double cap = t.capacities_bps[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(t.capacities_bps.size()) - 1))];
    for (auto [src, dst] : {std::pair{a, b}, std::pair{b, a}}) {
      const double prop = rng.uniform(t.min_propagation_s, t.max_propagation_s);
      topo.links.push_back(Link{next_id, static_cast<std::uint32_t>(src), static_cast<std::uint32_t>(dst), cap, prop});
      topo.queues.push_back(Queue{next_id, next_id, t.buffer_packets});
      ++next_id;
    }
  }
  return topo;
}

// BFS over links in id order; returns queue ids of the shortest path.
std::vector<std::uint32_t> shortest_path(const Topology& topo, std::uint32_t src, std::uint32_t dst) {
  const std::size_t n = topo.nodes.size();
  std::vector<int> via(n, -1);
  std::vector<bool> seen(n, false);
  std::deque<std::uint32_t> frontier{src};
  seen[src] = true;
  while (!frontier.empty()) {
    const std::uint32_t u = frontier.front();
    frontier.pop_front();
    if (u == dst) break;
    for (const Link& l : topo.links) {
      if (l.src != u || seen[l.dst]) continue;
      seen[l.dst] = true;
      via[l.dst] = static_cast<int>(l.id);
      frontier.push_back(l.dst);
    }
  }
  if (!seen[dst]) return {};
  std::vector<std::uint32_t> path;
  for (std::uint32_t v = dst; v != src;) {
    const Link& l = topo.link(static_cast<std::uint32_t>(via[v]));
    path.push_back(l.id);  // queue id equals link id for generated topologies
    v = l.src;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<std::vector<std::uint32_t>> random_routes(const ScenarioTemplate& t, const Topology& topo, CounterRng rng) {
  const int count = static_cast<int>(rng.integer(t.min_flows, t.max_flows));
  const auto n = static_cast<std::int64_t>(topo.nodes.size());
  std::vector<std::vector<std::uint32_t>> routes;
  for (int i = 0; i < count; ++i) {
    const auto src = static_cast<std::uint32_t>(rng.integer(0, n - 1));
    auto dst = static_cast<std::uint32_t>(rng.integer(0, n - 2));
    if (dst >= src) ++dst;
    auto path = shortest_path(topo, src, dst);
    if (path.empty()) throw ConfigError("generator: no path between nodes " + std::to_string(src) + " and " + std::to_string(dst));
    routes.push_back(std::move(path));
  }
  return routes;
}

const std::vector<double>& replay_gaps(const std::string& path) {
  static thread_local std::string cached_path;
  static thread_local std::vector<double> cached;
  if (path != cached_path) {
    Scenario probe;
    probe.flows.push_back(Flow{0, {}, TrafficModel{Replay{path, 1.0, {}}, FixedSize{}}});
    load_replay_files(probe);
    cached = std::get<Replay>(probe.flows[0].traffic.arrivals).inter_arrivals;
    cached_path = path;
  }
  return cached;
}

ArrivalProcess arrivals_for(const ScenarioTemplate& t, TrafficKind kind, double rate, CounterRng& rng) {
  switch (kind) {
    case TrafficKind::Poisson:
      return Poisson{rate};
    case TrafficKind::OnOff: {
      const double on = rng.uniform(t.min_on_mean_s, t.max_on_mean_s);
      const double off = rng.uniform(t.min_off_mean_s, t.max_off_mean_s);
      return OnOff{on, off, rate * (on + off) / on};
    }
    case TrafficKind::HeavyTail:
      return HeavyTail{std::log(1.0 / rate) - 0.5 * t.heavy_tail_sigma * t.heavy_tail_sigma, t.heavy_tail_sigma};
    case TrafficKind::Replay: {
      const auto& gaps = replay_gaps(t.replay_path);
      double total = 0.0;
      for (double g : gaps) total += g;
      const double mean_gap = total / static_cast<double>(gaps.size());
      return Replay{t.replay_path, 1.0 / (rate * mean_gap), gaps};
    }
  }
  throw ConfigError("generator: unknown traffic kind");
}

}  // namespace

void ScenarioTemplate::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("scenario template infeasible: " + what); };
  if (min_nodes < 2) fail("min_nodes >= 2 (a flow needs two distinct endpoints)");
  if (max_nodes < min_nodes) fail("max_nodes >= min_nodes");
  if (!(extra_edge_probability >= 0.0 && extra_edge_probability <= 1.0)) fail("extra_edge_probability in [0, 1]");
  if (capacities_bps.empty()) fail("capacities_bps nonempty");
  for (double c : capacities_bps)
    if (!(c > 0.0) || !std::isfinite(c)) fail("capacities_bps > 0");
  if (!(min_propagation_s >= 0.0) || max_propagation_s < min_propagation_s) fail("0 <= min_propagation_s <= max_propagation_s");
  if (buffer_packets == 0) fail("buffer_packets > 0");
  if (min_flows < 1 || max_flows < min_flows) fail("1 <= min_flows <= max_flows");
  if (traffic_kinds.empty()) fail("traffic_kinds nonempty");
  if (!(packet_size.mean_bytes > 0.0)) fail("packet mean size > 0");
  if (!(min_on_mean_s > 0.0) || max_on_mean_s < min_on_mean_s) fail("0 < min_on_mean_s <= max_on_mean_s");
  if (!(min_off_mean_s > 0.0) || max_off_mean_s < min_off_mean_s) fail("0 < min_off_mean_s <= max_off_mean_s");
  if (!(heavy_tail_sigma > 0.0)) fail("heavy_tail_sigma > 0");
  if (std::find(traffic_kinds.begin(), traffic_kinds.end(), TrafficKind::Replay) != traffic_kinds.end() && replay_path.empty())
    fail("replay_path set when replay traffic is requested");
  if (!(utilization_cap > 0.0 && utilization_cap < 1.0)) fail("utilization_cap in (0, 1)");
  if (!(min_utilization > 0.0) || max_utilization < min_utilization || max_utilization > utilization_cap)
    fail("0 < min_utilization <= max_utilization <= utilization_cap");
  if (!(min_duration_s > 0.0) || max_duration_s < min_duration_s) fail("0 < min_duration_s <= max_duration_s");
  if (fixed_routing && !topology_seed) fail("fixed_routing requires topology_seed");
}

Scenario gen_scenario(const ScenarioTemplate& t, std::uint64_t id, std::uint64_t seed) {
  Scenario s;
  s.id = id;
  s.seed = derive_key(seed, id);
  s.fidelity = t.fidelity;
  s.topology = t.topology_seed ? random_topology(t, stream_for(*t.topology_seed, 0, kTopology))
                               : random_topology(t, stream_for(seed, id, kTopology));
  const auto routes = t.fixed_routing ? random_routes(t, s.topology, stream_for(*t.topology_seed, 0, kRouting))
                                      : random_routes(t, s.topology, stream_for(seed, id, kRouting));

  CounterRng traffic = stream_for(seed, id, kTraffic);
  const double u = traffic.uniform(t.min_utilization, t.max_utilization);
  std::vector<double> weight(routes.size());
  std::vector<double> load(s.topology.links.size(), 0.0);
  for (std::size_t f = 0; f < routes.size(); ++f) {
    weight[f] = traffic.uniform(0.2, 1.0);
    for (std::uint32_t q : routes[f]) load[q] += weight[f];
  }
  double scale = std::numeric_limits<double>::infinity();
  for (const Link& l : s.topology.links)
    if (load[l.id] > 0.0) scale = std::min(scale, u * l.capacity_bps / load[l.id]);

  for (std::size_t f = 0; f < routes.size(); ++f) {
    const TrafficKind kind = t.traffic_kinds[static_cast<std::size_t>(traffic.integer(0, static_cast<std::int64_t>(t.traffic_kinds.size()) - 1))];
    const double rate = scale * weight[f] / (8.0 * t.packet_size.mean_bytes);
    PacketSizeModel size = t.packet_size.exponential ? PacketSizeModel{ExponentialSize{t.packet_size.mean_bytes}}
                                                     : PacketSizeModel{FixedSize{t.packet_size.mean_bytes}};
    s.flows.push_back(Flow{static_cast<std::uint32_t>(f), routes[f], TrafficModel{arrivals_for(t, kind, rate, traffic), size}});
  }

  CounterRng timing = stream_for(seed, id, kTiming);
  s.duration = timing.uniform(t.min_duration_s, t.max_duration_s);
  s.validate();
  return s;
}

std::vector<Scenario> gen_scenarios(const ScenarioTemplate& t, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ConfigError("gen_scenarios: count must be > 0");
  t.validate();
  std::vector<Scenario> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(gen_scenario(t, i, seed));
  return out;
}

}  // namespace netxfer::netsim
