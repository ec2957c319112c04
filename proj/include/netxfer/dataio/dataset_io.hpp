#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "netxfer/dataio/partition.hpp"
#include "netxfer/dataio/windows.hpp"

namespace netxfer::dataio {

inline constexpr const char* kWindowsSchema = "windows/1";

// NDJSON: a header object with the graph, then one WindowSample per line in
// window-major order.
void write_windowed(std::ostream& out, const WindowedScenario& ws);
WindowedScenario read_windowed(std::istream& in);
void write_windowed(const std::filesystem::path& path, const WindowedScenario& ws);
WindowedScenario read_windowed(const std::filesystem::path& path);

struct Dataset {
  std::vector<WindowedScenario> scenarios;  // sorted by scenario id
  DatasetPartition partition;

  const WindowedScenario& by_id(std::uint64_t id) const;
  std::vector<WindowedScenario> select(std::span<const std::uint64_t> ids) const;
  std::vector<WindowedScenario> training() const { return select(partition.training); }
  std::vector<WindowedScenario> validation() const { return select(partition.validation); }
  std::vector<WindowedScenario> evaluation() const { return select(partition.evaluation); }
};

// Directory layout: <dir>/partition.json and <dir>/windows/scenario_<id>.ndjson.
Dataset load_dataset(const std::filesystem::path& dir);
std::filesystem::path windows_file(const std::filesystem::path& dir, std::uint64_t scenario_id);

}  // namespace netxfer::dataio
