#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "netxfer/netsim/scenario.hpp"

namespace netxfer::netsim {

struct PacketRecord {
  std::uint32_t flow = 0;
  double send_time = 0.0;
  double arrival_time = 0.0;  // meaningless when dropped
  double size = 0.0;          // bytes
  bool dropped = false;

  double delay() const { return arrival_time - send_time; }
};

// Order in which packets entered and left each queue; indices refer to
// PacketTrace::packets. Only filled when requested.
struct QueueLog {
  std::vector<std::vector<std::uint64_t>> arrivals;    // per queue (topology order)
  std::vector<std::vector<std::uint64_t>> departures;  // per queue
};

struct PacketTrace {
  // Grouped by flow (scenario flow order), sorted by send time within a flow.
  std::vector<PacketRecord> packets;
  std::optional<QueueLog> queue_log;

  std::size_t delivered() const;
  std::size_t dropped() const;
  // Zero delivered packets. Not an error; callers decide what to do with it.
  bool flagged_empty() const { return delivered() == 0; }
};

struct SimulationOptions {
  bool record_queue_log = false;
};

// Store-and-forward FIFO simulation. Per hop a packet waits for the queue,
// transmits for size*8/capacity, then propagates. Perturbed fidelity derates
// capacity and adds max(0, processing + N(0, jitter)) per hop. Events at equal
// times are ordered by (kind, sequence number), so a scenario always yields the
// same trace.
PacketTrace simulate(const Scenario& scenario, const SimulationOptions& options = {});

}  // namespace netxfer::netsim
