#include "netxfer/dataio/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "netxfer/errors.hpp"
#include "netxfer/netsim/rng.hpp"

namespace netxfer::dataio {
namespace {

constexpr std::uint64_t kShuffleStream = 0x5350'4c49'54ULL;

std::vector<std::uint64_t> shuffled(std::span<const std::uint64_t> ids, std::uint64_t seed) {
  std::vector<std::uint64_t> out(ids.begin(), ids.end());
  netsim::CounterRng rng(seed, kShuffleStream);
  // Fisher-Yates written out so the permutation does not depend on the standard library.
  for (std::size_t i = out.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(i) - 1));
    std::swap(out[i - 1], out[j]);
  }
  return out;
}

}  // namespace

DatasetPartition split_counts(std::span<const std::uint64_t> ids, std::array<std::size_t, 3> counts, std::uint64_t seed) {
  if (counts[0] + counts[1] + counts[2] > ids.size())
    throw ConfigError("split: requested " + std::to_string(counts[0] + counts[1] + counts[2]) + " scenarios but only " +
                      std::to_string(ids.size()) + " available");
  const auto order = shuffled(ids, seed);
  DatasetPartition p;
  auto it = order.begin();
  p.training.assign(it, it + static_cast<std::ptrdiff_t>(counts[0]));
  it += static_cast<std::ptrdiff_t>(counts[0]);
  p.validation.assign(it, it + static_cast<std::ptrdiff_t>(counts[1]));
  it += static_cast<std::ptrdiff_t>(counts[1]);
  p.evaluation.assign(it, it + static_cast<std::ptrdiff_t>(counts[2]));
  return p;
}

DatasetPartition split(std::span<const std::uint64_t> ids, std::array<double, 3> fractions, std::uint64_t seed) {
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw ConfigError("split: fractions must be >= 0");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("split: fractions must sum to 1");

  const auto n = static_cast<double>(ids.size());
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = fractions[i] * n;
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < ids.size(); ++k, ++assigned) ++counts[order[k % 3]];

  static constexpr const char* kNames[] = {"training", "validation", "evaluation"};
  for (std::size_t i = 0; i < 3; ++i)
    if (fractions[i] > 0.0 && counts[i] == 0)
      throw ConfigError(std::string("split: nonzero ") + kNames[i] + " fraction yields zero scenarios");
  return split_counts(ids, counts, seed);
}

nlohmann::json partition_to_json(const DatasetPartition& p) {
  return {{"schema", "partition/1"}, {"training", p.training}, {"validation", p.validation}, {"evaluation", p.evaluation}};
}

DatasetPartition partition_from_json(const nlohmann::json& j) {
  DatasetPartition p;
  p.training = j.at("training").get<std::vector<std::uint64_t>>();
  p.validation = j.at("validation").get<std::vector<std::uint64_t>>();
  p.evaluation = j.at("evaluation").get<std::vector<std::uint64_t>>();
  return p;
}

void write_partition(const std::filesystem::path& path, const DatasetPartition& p) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << partition_to_json(p).dump(2) << '\n';
}

DatasetPartition read_partition(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return partition_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("partition " + path.string() + ": " + e.what());
  }
}

}  // namespace netxfer::dataio
