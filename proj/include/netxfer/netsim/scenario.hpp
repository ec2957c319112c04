#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace netxfer::netsim {

inline constexpr std::uint64_t kUnlimitedBuffer = std::numeric_limits<std::uint64_t>::max();
inline constexpr std::uint64_t kDefaultBuffer = 1000;

struct Link {
  std::uint32_t id = 0;
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  double capacity_bps = 0.0;
  double propagation_s = 0.0;
};

// Egress FIFO of a link. Buffer size counts every packet held, including the
// one being transmitted.
struct Queue {
  std::uint32_t id = 0;
  std::uint32_t link = 0;
  std::uint64_t buffer_packets = kDefaultBuffer;
};

struct Topology {
  std::vector<std::uint32_t> nodes;
  std::vector<Link> links;
  std::vector<Queue> queues;

  // Throws ConfigError on non-positive capacities, dangling node references,
  // or links without exactly one queue.
  void validate() const;

  const Queue& queue(std::uint32_t id) const;
  const Link& link(std::uint32_t id) const;
  bool has_queue(std::uint32_t id) const;
};

struct FixedSize {
  double bytes = 1000.0;
};
struct ExponentialSize {
  double mean_bytes = 1000.0;
};
using PacketSizeModel = std::variant<FixedSize, ExponentialSize>;

struct Poisson {
  double rate = 1.0;  // packets/s
};
// Alternates exponentially distributed on/off periods; constant packet rate while on.
struct OnOff {
  double on_mean = 0.1;
  double off_mean = 0.1;
  double on_rate = 1.0;
};
// Replays inter-arrival times from a text file (one value per line, seconds),
// cycling when exhausted. time_scale stretches every gap.
struct Replay {
  std::string path;
  double time_scale = 1.0;
  std::vector<double> inter_arrivals;
};
// Lognormal inter-arrival times; stand-in for measured internet traces.
struct HeavyTail {
  double mu = 0.0;
  double sigma = 1.0;
};
using ArrivalProcess = std::variant<Poisson, OnOff, Replay, HeavyTail>;

struct TrafficModel {
  ArrivalProcess arrivals;
  PacketSizeModel size;

  double mean_packet_rate() const;
  double mean_packet_size() const;
  void validate() const;
};

struct Flow {
  std::uint32_t id = 0;
  std::vector<std::uint32_t> path;  // queue ids, in traversal order
  TrafficModel traffic;
};

struct Ideal {};
struct Perturbed {
  double processing_delay = 50e-6;  // s per hop
  double capacity_derating = 0.95;
  double jitter_sd = 10e-6;  // s
};
using Fidelity = std::variant<Ideal, Perturbed>;

struct Scenario {
  std::uint64_t id = 0;
  Topology topology;
  std::vector<Flow> flows;
  double duration = 1.0;
  std::uint64_t seed = 0;
  Fidelity fidelity = Ideal{};

  // Topology invariants, contiguous paths, positive traffic parameters.
  void validate() const;
};

// Loads Replay inter-arrival files that have not been read yet.
void load_replay_files(Scenario& scenario);

}  // namespace netxfer::netsim
