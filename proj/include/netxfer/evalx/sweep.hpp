#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "netxfer/dataio/windows.hpp"
#include "netxfer/rnmodel/train.hpp"
#include "netxfer/transfer/policy.hpp"

namespace netxfer::evalx {

struct SweepConfig {
  std::vector<std::size_t> counts;   // strictly increasing, each <= pool size
  std::vector<std::uint64_t> seeds;  // at least 3
  transfer::BlockPolicy policy{transfer::Action::Freeze, transfer::Action::FineTune, transfer::Action::Retrain};
  rnmodel::TrainConfig scratch_train;   // from-scratch runs
  rnmodel::TrainConfig finetune_train;  // fine-tuning runs
  std::size_t threads = 1;              // concurrent (count, seed) cells

  void validate(std::size_t pool_size) const;  // ConfigError
};

struct EfficiencyPoint {
  std::size_t count = 0;
  std::vector<double> scratch;    // MAPE % per seed
  std::vector<double> finetuned;  // MAPE % per seed
  double scratch_mape = 0.0;      // seed average
  double finetuned_mape = 0.0;

  // (scratch - finetuned) / scratch
  double advantage() const { return (scratch_mape - finetuned_mape) / scratch_mape; }
};

struct EfficiencyCurve {
  std::vector<EfficiencyPoint> points;
  std::vector<std::string> warnings;  // e.g. scratch MAPE rising with more data
};

// For every count n and seed: draw n scenarios from the pool (subsets are
// nested across counts for one seed), train a model from scratch and fine-tune
// the donor, then score both on the evaluation split. Validation is shared by
// every cell.
EfficiencyCurve efficiency_sweep(const rnmodel::Model& donor, std::span<const dataio::WindowedScenario> pool,
                                 std::span<const dataio::WindowedScenario> validation,
                                 std::span<const dataio::WindowedScenario> evaluation, const SweepConfig& config);

// count,scratch_mape,finetuned_mape,advantage,seeds
void write_curve_csv(std::ostream& out, const EfficiencyCurve& curve);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must go to
// per-index slots; the first exception is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace netxfer::evalx
