#include "netxfer/netsim/scenario_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "netxfer/errors.hpp"
#include "netxfer/overloaded.hpp"

namespace netxfer::netsim {

using nlohmann::json;

namespace {

json traffic_to_json(const TrafficModel& t) {
  json j = std::visit(Overloaded{
                          [](const Poisson& p) { return json{{"kind", "poisson"}, {"rate", p.rate}}; },
                          [](const OnOff& o) {
                            return json{{"kind", "onoff"}, {"on_mean", o.on_mean}, {"off_mean", o.off_mean}, {"on_rate", o.on_rate}};
                          },
                          [](const Replay& r) { return json{{"kind", "replay"}, {"path", r.path}, {"time_scale", r.time_scale}}; },
                          [](const HeavyTail& h) { return json{{"kind", "heavytail"}, {"mu", h.mu}, {"sigma", h.sigma}}; },
                      },
                      t.arrivals);
  j["size"] = std::visit(Overloaded{
                             [](const FixedSize& f) { return json{{"kind", "fixed"}, {"bytes", f.bytes}}; },
                             [](const ExponentialSize& e) { return json{{"kind", "exponential"}, {"mean_bytes", e.mean_bytes}}; },
                         },
                         t.size);
  return j;
}

TrafficModel traffic_from_json(const json& j, const std::filesystem::path& base_dir) {
  TrafficModel t;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "poisson") {
    t.arrivals = Poisson{j.at("rate").get<double>()};
  } else if (kind == "onoff") {
    t.arrivals = OnOff{j.at("on_mean").get<double>(), j.at("off_mean").get<double>(), j.at("on_rate").get<double>()};
  } else if (kind == "replay") {
    std::filesystem::path p = j.at("path").get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    t.arrivals = Replay{p.string(), j.value("time_scale", 1.0), {}};
  } else if (kind == "heavytail") {
    t.arrivals = HeavyTail{j.at("mu").get<double>(), j.at("sigma").get<double>()};
  } else {
    throw ConfigError("scenario: unknown traffic kind '" + kind + "'");
  }
  const json& size = j.at("size");
  const std::string size_kind = size.at("kind").get<std::string>();
  if (size_kind == "fixed") {
    t.size = FixedSize{size.at("bytes").get<double>()};
  } else if (size_kind == "exponential") {
    t.size = ExponentialSize{size.at("mean_bytes").get<double>()};
  } else {
    throw ConfigError("scenario: unknown packet size kind '" + size_kind + "'");
  }
  return t;
}

}  // namespace

json fidelity_to_json(const Fidelity& fidelity) {
  return std::visit(Overloaded{
                        [](const Ideal&) { return json{{"mode", "ideal"}}; },
                        [](const Perturbed& p) {
                          return json{{"mode", "perturbed"},
                                      {"processing_delay", p.processing_delay},
                                      {"capacity_derating", p.capacity_derating},
                                      {"jitter_sd", p.jitter_sd}};
                        },
                    },
                    fidelity);
}

Fidelity fidelity_from_json(const json& j) {
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "ideal") return Ideal{};
  if (mode == "perturbed") {
    Perturbed p;
    p.processing_delay = j.value("processing_delay", p.processing_delay);
    p.capacity_derating = j.value("capacity_derating", p.capacity_derating);
    p.jitter_sd = j.value("jitter_sd", p.jitter_sd);
    return p;
  }
  throw ConfigError("unknown fidelity mode '" + mode + "'");
}

json scenario_to_json(const Scenario& s) {
  json links = json::array();
  for (const Link& l : s.topology.links)
    links.push_back({{"id", l.id}, {"src", l.src}, {"dst", l.dst}, {"capacity", l.capacity_bps}, {"propagation", l.propagation_s}});
  json queues = json::array();
  for (const Queue& q : s.topology.queues) {
    json jq = {{"id", q.id}, {"link", q.link}};
    jq["buffer"] = q.buffer_packets == kUnlimitedBuffer ? json(nullptr) : json(q.buffer_packets);
    queues.push_back(jq);
  }
  json flows = json::array();
  for (const Flow& f : s.flows) flows.push_back({{"id", f.id}, {"path", f.path}, {"traffic", traffic_to_json(f.traffic)}});
  return json{{"schema", kScenarioSchema},
              {"id", s.id},
              {"seed", s.seed},
              {"duration", s.duration},
              {"fidelity", fidelity_to_json(s.fidelity)},
              {"topology", {{"nodes", s.topology.nodes}, {"links", links}, {"queues", queues}}},
              {"flows", flows}};
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    if (j.value("schema", std::string{}) != kScenarioSchema)
      throw ConfigError(std::string("scenario: expected schema '") + kScenarioSchema + "'");
    Scenario s;
    s.id = j.at("id").get<std::uint64_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.duration = j.at("duration").get<double>();
    s.fidelity = fidelity_from_json(j.at("fidelity"));
    const json& topo = j.at("topology");
    s.topology.nodes = topo.at("nodes").get<std::vector<std::uint32_t>>();
    for (const json& l : topo.at("links"))
      s.topology.links.push_back(Link{l.at("id").get<std::uint32_t>(), l.at("src").get<std::uint32_t>(), l.at("dst").get<std::uint32_t>(),
                                      l.at("capacity").get<double>(), l.at("propagation").get<double>()});
    for (const json& q : topo.at("queues")) {
      const json& buf = q.at("buffer");
      s.topology.queues.push_back(Queue{q.at("id").get<std::uint32_t>(), q.at("link").get<std::uint32_t>(),
                                        buf.is_null() ? kUnlimitedBuffer : buf.get<std::uint64_t>()});
    }
    for (const json& f : j.at("flows"))
      s.flows.push_back(Flow{f.at("id").get<std::uint32_t>(), f.at("path").get<std::vector<std::uint32_t>>(),
                             traffic_from_json(f.at("traffic"), base_dir)});
    load_replay_files(s);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: malformed JSON: ") + e.what());
  }
}

void write_scenario(const std::filesystem::path& path, const Scenario& scenario) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << scenario_to_json(scenario).dump(2) << '\n';
}

Scenario read_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("scenario " + path.string() + ": " + e.what());
  }
  return scenario_from_json(j, path.parent_path());
}

void write_trace_ndjson(std::ostream& out, const PacketTrace& trace) {
  for (const PacketRecord& p : trace.packets) {
    json j = {{"flow", p.flow}, {"send", p.send_time}, {"size", p.size}, {"dropped", p.dropped}};
    j["arrival"] = p.dropped ? json(nullptr) : json(p.arrival_time);
    out << j.dump() << '\n';
  }
}

PacketTrace read_trace_ndjson(std::istream& in) {
  PacketTrace trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    PacketRecord p;
    p.flow = j.at("flow").get<std::uint32_t>();
    p.send_time = j.at("send").get<double>();
    p.size = j.at("size").get<double>();
    p.dropped = j.at("dropped").get<bool>();
    if (!p.dropped) p.arrival_time = j.at("arrival").get<double>();
    trace.packets.push_back(p);
  }
  return trace;
}

}  // namespace netxfer::netsim
