#include "netxfer/dataio/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "json.hpp"
#include "netxfer/errors.hpp"

namespace netxfer::dataio {

using nlohmann::json;

void write_windowed(std::ostream& out, const WindowedScenario& ws) {
  json links = json::array(), queues = json::array(), flows = json::array();
  for (const auto& l : ws.graph.links)
    links.push_back({{"id", l.id}, {"src", l.src}, {"dst", l.dst}, {"capacity", l.capacity_bps}, {"propagation", l.propagation_s}});
  for (const auto& q : ws.graph.queues) {
    json jq = {{"id", q.id}, {"link", q.link}};
    jq["buffer"] = std::isinf(q.buffer_packets) ? json(nullptr) : json(q.buffer_packets);
    queues.push_back(jq);
  }
  for (const auto& f : ws.graph.flows) flows.push_back({{"id", f.id}, {"path", f.path}});
  const json header = {{"schema", kWindowsSchema},
                       {"scenario", ws.scenario_id},
                       {"window_length", ws.window_length},
                       {"duration", ws.duration},
                       {"num_windows", ws.num_windows},
                       {"graph", {{"links", links}, {"queues", queues}, {"flows", flows}}}};
  out << header.dump() << '\n';
  for (const auto& s : ws.samples) {
    const json j = {{"scenario", s.scenario_id},
                    {"window", s.window},
                    {"flow", s.flow},
                    {"avg_bandwidth", s.features[kAvgBandwidth]},
                    {"packet_rate", s.features[kPacketRate]},
                    {"mean_packet_size", s.features[kMeanPacketSize]},
                    {"path_length", s.features[kPathLength]},
                    {"target", s.target},
                    {"packet_count", s.packet_count}};
    out << j.dump() << '\n';
  }
}

WindowedScenario read_windowed(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("windows: missing header");
  try {
    const json header = json::parse(line);
    if (header.value("schema", std::string{}) != kWindowsSchema) throw DataError("windows: unexpected schema");
    WindowedScenario ws;
    ws.scenario_id = header.at("scenario").get<std::uint64_t>();
    ws.window_length = header.at("window_length").get<double>();
    ws.duration = header.at("duration").get<double>();
    ws.num_windows = header.at("num_windows").get<std::size_t>();
    const json& g = header.at("graph");
    for (const json& l : g.at("links"))
      ws.graph.links.push_back(GraphLink{l.at("id").get<std::uint32_t>(), l.at("src").get<std::uint32_t>(), l.at("dst").get<std::uint32_t>(),
                                         l.at("capacity").get<double>(), l.at("propagation").get<double>()});
    for (const json& q : g.at("queues")) {
      const json& b = q.at("buffer");
      ws.graph.queues.push_back(GraphQueue{q.at("id").get<std::uint32_t>(), q.at("link").get<std::size_t>(),
                                           b.is_null() ? std::numeric_limits<double>::infinity() : b.get<double>()});
    }
    for (const json& f : g.at("flows"))
      ws.graph.flows.push_back(GraphFlow{f.at("id").get<std::uint32_t>(), f.at("path").get<std::vector<std::size_t>>()});
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      WindowSample s;
      s.scenario_id = j.at("scenario").get<std::uint64_t>();
      s.window = j.at("window").get<std::uint32_t>();
      s.flow = j.at("flow").get<std::uint32_t>();
      s.features = {j.at("avg_bandwidth").get<double>(), j.at("packet_rate").get<double>(), j.at("mean_packet_size").get<double>(),
                    j.at("path_length").get<double>()};
      s.target = j.at("target").get<double>();
      s.packet_count = j.at("packet_count").get<std::uint64_t>();
      ws.samples.push_back(s);
    }
    if (ws.samples.size() != ws.num_windows * ws.num_flows()) throw DataError("windows: sample grid is incomplete");
    return ws;
  } catch (const json::exception& e) {
    throw DataError(std::string("windows: malformed record: ") + e.what());
  }
}

void write_windowed(const std::filesystem::path& path, const WindowedScenario& ws) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_windowed(out, ws);
}

WindowedScenario read_windowed(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  return read_windowed(in);
}

const WindowedScenario& Dataset::by_id(std::uint64_t id) const {
  auto it = std::lower_bound(scenarios.begin(), scenarios.end(), id,
                             [](const WindowedScenario& ws, std::uint64_t v) { return ws.scenario_id < v; });
  if (it == scenarios.end() || it->scenario_id != id) throw DataError("dataset: unknown scenario " + std::to_string(id));
  return *it;
}

std::vector<WindowedScenario> Dataset::select(std::span<const std::uint64_t> ids) const {
  std::vector<WindowedScenario> out;
  out.reserve(ids.size());
  for (std::uint64_t id : ids) out.push_back(by_id(id));
  return out;
}

std::filesystem::path windows_file(const std::filesystem::path& dir, std::uint64_t scenario_id) {
  char name[64];
  std::snprintf(name, sizeof name, "scenario_%05llu.ndjson", static_cast<unsigned long long>(scenario_id));
  return dir / "windows" / name;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir / "windows")) throw DataError("dataset: " + dir.string() + " has no windows/ directory");
  Dataset d;
  d.partition = read_partition(dir / "partition.json");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "windows"))
    if (entry.path().extension() == ".ndjson") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) d.scenarios.push_back(read_windowed(f));
  std::sort(d.scenarios.begin(), d.scenarios.end(),
            [](const WindowedScenario& a, const WindowedScenario& b) { return a.scenario_id < b.scenario_id; });
  if (d.scenarios.empty()) throw DataError("dataset: " + dir.string() + " is empty");
  return d;
}

}  // namespace netxfer::dataio
