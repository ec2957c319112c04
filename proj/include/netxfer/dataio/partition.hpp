#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"

namespace netxfer::dataio {

struct DatasetPartition {
  std::vector<std::uint64_t> training;
  std::vector<std::uint64_t> validation;
  std::vector<std::uint64_t> evaluation;  // may be empty

  friend bool operator==(const DatasetPartition&, const DatasetPartition&) = default;
};

// Seeded shuffle, then contiguous slices. Fractions must sum to 1; counts use
// largest remainders. A nonzero fraction that rounds to zero scenarios throws.
DatasetPartition split(std::span<const std::uint64_t> ids, std::array<double, 3> fractions, std::uint64_t seed);

// Same, with explicit slice sizes; their sum must not exceed ids.size().
DatasetPartition split_counts(std::span<const std::uint64_t> ids, std::array<std::size_t, 3> counts, std::uint64_t seed);

nlohmann::json partition_to_json(const DatasetPartition& p);
DatasetPartition partition_from_json(const nlohmann::json& j);
void write_partition(const std::filesystem::path& path, const DatasetPartition& p);
DatasetPartition read_partition(const std::filesystem::path& path);

}  // namespace netxfer::dataio
