#include "netxfer/netsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <unordered_map>

#include "netxfer/errors.hpp"
#include "netxfer/netsim/rng.hpp"
#include "netxfer/overloaded.hpp"

namespace netxfer::netsim {
namespace {

constexpr std::uint64_t kFlowStreamBase = 1'000;
constexpr std::uint64_t kQueueStreamBase = 2'000'000;

enum class EventKind : std::uint8_t { Departure = 0, Arrival = 1, Generate = 2 };

struct Event {
  double time;
  EventKind kind;
  std::uint64_t seq;
  std::uint32_t flow;   // Arrival, Generate
  std::uint32_t hop;    // Arrival
  std::uint64_t index;  // Arrival: packet index within flow; Departure: queue slot

  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (kind != o.kind) return kind > o.kind;
    return seq > o.seq;
  }
};

struct PacketRef {
  std::uint32_t flow;
  std::uint64_t index;
};

// Produces send times and sizes for one flow from its own stream.
class FlowSource {
 public:
  FlowSource(const TrafficModel& traffic, CounterRng rng) : traffic_(traffic), rng_(rng) {
    if (const auto* o = std::get_if<OnOff>(&traffic_.arrivals)) {
      on_ = rng_.uniform() < o->on_mean / (o->on_mean + o->off_mean);
      period_end_ = rng_.exponential(on_ ? o->on_mean : o->off_mean);
      if (!on_) {
        next_on_ = period_end_;
        period_end_ = next_on_ + rng_.exponential(o->on_mean);
        on_ = true;
      }
    }
    if (const auto* r = std::get_if<Replay>(&traffic_.arrivals)) {
      replay_pos_ = static_cast<std::size_t>(rng_() % r->inter_arrivals.size());
    }
  }

  // Next send time strictly after the previous one.
  double next_time() {
    now_ = std::visit(Overloaded{
                          [&](const Poisson& p) { return now_ + rng_.exponential(1.0 / p.rate); },
                          [&](const OnOff& o) { return next_on_off(o); },
                          [&](const Replay& r) {
                            const double gap = r.inter_arrivals[replay_pos_] * r.time_scale;
                            replay_pos_ = (replay_pos_ + 1) % r.inter_arrivals.size();
                            return now_ + gap;
                          },
                          [&](const HeavyTail& h) { return now_ + std::exp(rng_.normal(h.mu, h.sigma)); },
                      },
                      traffic_.arrivals);
    return now_;
  }

  double next_size() {
    return std::visit(Overloaded{
                          [](const FixedSize& f) { return f.bytes; },
                          [&](const ExponentialSize& e) { return rng_.exponential(e.mean_bytes); },
                      },
                      traffic_.size);
  }

 private:
  double next_on_off(const OnOff& o) {
    // Constant-rate packets inside on periods, first packet at the period start.
    double t = started_ ? now_ + 1.0 / o.on_rate : next_on_;
    started_ = true;
    while (t >= period_end_) {
      next_on_ = period_end_ + rng_.exponential(o.off_mean);
      period_end_ = next_on_ + rng_.exponential(o.on_mean);
      t = next_on_;
    }
    return t;
  }

  const TrafficModel& traffic_;
  CounterRng rng_;
  double now_ = 0.0;
  bool on_ = true;
  bool started_ = false;
  double next_on_ = 0.0;
  double period_end_ = 0.0;
  std::size_t replay_pos_ = 0;
};

struct QueueState {
  double capacity;  // effective bits/s
  double propagation;
  std::uint64_t buffer;
  std::deque<PacketRef> held;
  CounterRng jitter;
};

}  // namespace

std::size_t PacketTrace::delivered() const {
  return static_cast<std::size_t>(std::count_if(packets.begin(), packets.end(), [](const PacketRecord& p) { return !p.dropped; }));
}

std::size_t PacketTrace::dropped() const { return packets.size() - delivered(); }

PacketTrace simulate(const Scenario& scenario, const SimulationOptions& options) {
  scenario.validate();
  const Topology& topo = scenario.topology;
  const Perturbed* perturbed = std::get_if<Perturbed>(&scenario.fidelity);
  const double derating = perturbed ? perturbed->capacity_derating : 1.0;

  std::unordered_map<std::uint32_t, std::size_t> slot_of;
  std::vector<QueueState> queues;
  queues.reserve(topo.queues.size());
  for (std::size_t i = 0; i < topo.queues.size(); ++i) {
    const Queue& q = topo.queues[i];
    const Link& l = topo.link(q.link);
    slot_of.emplace(q.id, i);
    queues.push_back(QueueState{l.capacity_bps * derating, l.propagation_s, q.buffer_packets, {},
                                CounterRng(scenario.seed, kQueueStreamBase + i)});
  }

  std::vector<std::vector<std::size_t>> paths(scenario.flows.size());
  std::vector<FlowSource> sources;
  sources.reserve(scenario.flows.size());
  for (std::size_t f = 0; f < scenario.flows.size(); ++f) {
    for (std::uint32_t qid : scenario.flows[f].path) paths[f].push_back(slot_of.at(qid));
    sources.emplace_back(scenario.flows[f].traffic, CounterRng(scenario.seed, kFlowStreamBase + f));
  }

  std::vector<std::vector<PacketRecord>> records(scenario.flows.size());
  std::vector<std::vector<PacketRef>> log_in, log_out;
  if (options.record_queue_log) {
    log_in.resize(queues.size());
    log_out.resize(queues.size());
  }

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  std::uint64_t seq = 0;
  auto push = [&](double time, EventKind kind, std::uint32_t flow, std::uint32_t hop, std::uint64_t index) {
    events.push(Event{time, kind, seq++, flow, hop, index});
  };

  for (std::size_t f = 0; f < sources.size(); ++f) {
    const double t = sources[f].next_time();
    if (t < scenario.duration) push(t, EventKind::Generate, static_cast<std::uint32_t>(f), 0, 0);
  }

  auto start_service = [&](std::size_t slot, double now) {
    const PacketRef& head = queues[slot].held.front();
    const double tx = records[head.flow][head.index].size * 8.0 / queues[slot].capacity;
    push(now + tx, EventKind::Departure, 0, 0, slot);
  };

  auto arrive = [&](PacketRef p, std::uint32_t hop, double now) {
    const std::size_t slot = paths[p.flow][hop];
    QueueState& q = queues[slot];
    if (q.held.size() >= q.buffer) {
      records[p.flow][p.index].dropped = true;
      return;
    }
    if (options.record_queue_log) log_in[slot].push_back(p);
    q.held.push_back(p);
    if (q.held.size() == 1) start_service(slot, now);
  };

  // Hop index of each in-flight packet, keyed by (flow, index) via a parallel array.
  std::vector<std::vector<std::uint32_t>> hop_of(scenario.flows.size());

  while (!events.empty()) {
    const Event ev = events.top();
    events.pop();
    switch (ev.kind) {
      case EventKind::Generate: {
        auto& recs = records[ev.flow];
        PacketRecord rec;
        rec.flow = scenario.flows[ev.flow].id;
        rec.send_time = ev.time;
        rec.size = sources[ev.flow].next_size();
        recs.push_back(rec);
        hop_of[ev.flow].push_back(0);
        arrive(PacketRef{ev.flow, recs.size() - 1}, 0, ev.time);
        const double t = sources[ev.flow].next_time();
        if (t < scenario.duration) push(t, EventKind::Generate, ev.flow, 0, 0);
        break;
      }
      case EventKind::Arrival:
        hop_of[ev.flow][ev.index] = ev.hop;
        arrive(PacketRef{ev.flow, ev.index}, ev.hop, ev.time);
        break;
      case EventKind::Departure: {
        QueueState& q = queues[ev.index];
        const PacketRef p = q.held.front();
        q.held.pop_front();
        if (options.record_queue_log) log_out[ev.index].push_back(p);
        double extra = q.propagation;
        if (perturbed) extra += std::max(0.0, perturbed->processing_delay + q.jitter.normal(0.0, perturbed->jitter_sd));
        const std::uint32_t hop = hop_of[p.flow][p.index];
        if (hop + 1 < paths[p.flow].size()) {
          push(ev.time + extra, EventKind::Arrival, p.flow, hop + 1, p.index);
        } else {
          records[p.flow][p.index].arrival_time = ev.time + extra;
        }
        if (!q.held.empty()) start_service(ev.index, ev.time);
        break;
      }
    }
  }

  PacketTrace trace;
  std::vector<std::uint64_t> offset(records.size() + 1, 0);
  for (std::size_t f = 0; f < records.size(); ++f) offset[f + 1] = offset[f] + records[f].size();
  trace.packets.reserve(offset.back());
  for (auto& recs : records) trace.packets.insert(trace.packets.end(), recs.begin(), recs.end());
  if (options.record_queue_log) {
    QueueLog log;
    auto convert = [&](const std::vector<std::vector<PacketRef>>& src, std::vector<std::vector<std::uint64_t>>& dst) {
      dst.resize(src.size());
      for (std::size_t s = 0; s < src.size(); ++s)
        for (const PacketRef& p : src[s]) dst[s].push_back(offset[p.flow] + p.index);
    };
    convert(log_in, log.arrivals);
    convert(log_out, log.departures);
    trace.queue_log = std::move(log);
  }
  return trace;
}

}  // namespace netxfer::netsim
