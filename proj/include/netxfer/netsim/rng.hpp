#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace netxfer::netsim {

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a; stable across platforms, used to derive stream labels from names.
constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Mixes a key with a stream label into an independent 64-bit key.
std::uint64_t derive_key(std::uint64_t key, std::uint64_t stream);

// Counter-based generator: the n-th output is a pure function of (key, n), so
// any number of independent streams can be derived from a scenario seed.
// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t key, std::uint64_t stream) : key_(derive_key(key, stream)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return splitmix64(key_ ^ (0x9E3779B97F4A7C15ULL * ++counter_)); }

  // Uniform in (0, 1); never returns 0 so it is safe under log().
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  double exponential(double mean);
  double normal(double mean, double sd);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace netxfer::netsim
