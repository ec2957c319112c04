#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "netxfer/errors.hpp"
#include "netxfer/netsim/scenario.hpp"
#include "netxfer/overloaded.hpp"

namespace netxfer::netsim {
namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void Topology::validate() const {
  std::set<std::uint32_t> node_ids(nodes.begin(), nodes.end());
  if (node_ids.size() != nodes.size()) throw ConfigError("topology: duplicate node id");
  std::set<std::uint32_t> link_ids;
  for (const Link& l : links) {
    if (!link_ids.insert(l.id).second) throw ConfigError("topology: duplicate link id " + std::to_string(l.id));
    if (!positive(l.capacity_bps)) throw ConfigError("topology: link " + std::to_string(l.id) + " capacity must be > 0");
    if (!(l.propagation_s >= 0.0) || !std::isfinite(l.propagation_s))
      throw ConfigError("topology: link " + std::to_string(l.id) + " propagation delay must be >= 0");
    if (!node_ids.contains(l.src) || !node_ids.contains(l.dst))
      throw ConfigError("topology: link " + std::to_string(l.id) + " references a missing node");
  }
  std::set<std::uint32_t> queue_ids;
  std::vector<int> per_link(links.size(), 0);
  for (const Queue& q : queues) {
    if (!queue_ids.insert(q.id).second) throw ConfigError("topology: duplicate queue id " + std::to_string(q.id));
    auto it = std::find_if(links.begin(), links.end(), [&](const Link& l) { return l.id == q.link; });
    if (it == links.end()) throw ConfigError("topology: queue " + std::to_string(q.id) + " references a missing link");
    if (q.buffer_packets == 0) throw ConfigError("topology: queue " + std::to_string(q.id) + " has zero buffer");
    ++per_link[static_cast<std::size_t>(it - links.begin())];
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (per_link[i] != 1)
      throw ConfigError("topology: link " + std::to_string(links[i].id) + " must have exactly one queue");
  }
}

const Queue& Topology::queue(std::uint32_t id) const {
  for (const Queue& q : queues)
    if (q.id == id) return q;
  throw ConfigError("topology: unknown queue " + std::to_string(id));
}

const Link& Topology::link(std::uint32_t id) const {
  for (const Link& l : links)
    if (l.id == id) return l;
  throw ConfigError("topology: unknown link " + std::to_string(id));
}

bool Topology::has_queue(std::uint32_t id) const {
  return std::any_of(queues.begin(), queues.end(), [&](const Queue& q) { return q.id == id; });
}

double TrafficModel::mean_packet_rate() const {
  return std::visit(Overloaded{
                        [](const Poisson& p) { return p.rate; },
                        [](const OnOff& o) { return o.on_rate * o.on_mean / (o.on_mean + o.off_mean); },
                        [](const Replay& r) {
                          if (r.inter_arrivals.empty()) return 0.0;
                          double total = 0.0;
                          for (double x : r.inter_arrivals) total += x;
                          return static_cast<double>(r.inter_arrivals.size()) / (total * r.time_scale);
                        },
                        [](const HeavyTail& h) { return 1.0 / std::exp(h.mu + 0.5 * h.sigma * h.sigma); },
                    },
                    arrivals);
}

double TrafficModel::mean_packet_size() const {
  return std::visit(Overloaded{
                        [](const FixedSize& f) { return f.bytes; },
                        [](const ExponentialSize& e) { return e.mean_bytes; },
                    },
                    size);
}

void TrafficModel::validate() const {
  std::visit(Overloaded{
                 [](const Poisson& p) {
                   if (!positive(p.rate)) throw ConfigError("traffic: poisson rate must be > 0");
                 },
                 [](const OnOff& o) {
                   if (!positive(o.on_mean) || !positive(o.off_mean) || !positive(o.on_rate))
                     throw ConfigError("traffic: on/off periods and rate must be > 0");
                 },
                 [](const Replay& r) {
                   if (!positive(r.time_scale)) throw ConfigError("traffic: replay time scale must be > 0");
                   if (r.inter_arrivals.empty()) throw ConfigError("traffic: replay file '" + r.path + "' is empty");
                   for (double x : r.inter_arrivals)
                     if (!positive(x)) throw ConfigError("traffic: replay inter-arrival times must be > 0");
                 },
                 [](const HeavyTail& h) {
                   if (!std::isfinite(h.mu) || !positive(h.sigma))
                     throw ConfigError("traffic: heavy-tail mu must be finite and sigma > 0");
                 },
             },
             arrivals);
  std::visit(Overloaded{
                 [](const FixedSize& f) {
                   if (!positive(f.bytes)) throw ConfigError("traffic: packet size must be > 0");
                 },
                 [](const ExponentialSize& e) {
                   if (!positive(e.mean_bytes)) throw ConfigError("traffic: mean packet size must be > 0");
                 },
             },
             size);
}

void Scenario::validate() const {
  topology.validate();
  if (!positive(duration)) throw ConfigError("scenario: duration must be > 0");
  if (const auto* p = std::get_if<Perturbed>(&fidelity)) {
    if (!(p->capacity_derating > 0.0 && p->capacity_derating <= 1.0))
      throw ConfigError("scenario: capacity derating must lie in (0, 1]");
    if (!(p->processing_delay >= 0.0) || !(p->jitter_sd >= 0.0))
      throw ConfigError("scenario: processing delay and jitter must be >= 0");
  }
  std::set<std::uint32_t> flow_ids;
  for (const Flow& f : flows) {
    const std::string tag = "scenario: flow " + std::to_string(f.id);
    if (!flow_ids.insert(f.id).second) throw ConfigError(tag + " duplicated");
    if (f.path.empty()) throw ConfigError(tag + " has an empty path");
    const Link* prev = nullptr;
    for (std::uint32_t qid : f.path) {
      if (!topology.has_queue(qid)) throw ConfigError(tag + " path references nonexistent queue " + std::to_string(qid));
      const Link& l = topology.link(topology.queue(qid).link);
      if (prev && prev->dst != l.src) throw ConfigError(tag + " path is not contiguous");
      prev = &l;
    }
    f.traffic.validate();
  }
}

void load_replay_files(Scenario& scenario) {
  for (Flow& f : scenario.flows) {
    auto* r = std::get_if<Replay>(&f.traffic.arrivals);
    if (!r || !r->inter_arrivals.empty()) continue;
    std::ifstream in(r->path);
    if (!in) throw ConfigError("traffic: cannot open replay file '" + r->path + "'");
    double x = 0.0;
    while (in >> x) r->inter_arrivals.push_back(x);
    if (r->inter_arrivals.empty()) throw ConfigError("traffic: replay file '" + r->path + "' is empty");
  }
}

}  // namespace netxfer::netsim
