#include "netxfer/evalx/sweep.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "netxfer/dataio/normalizer.hpp"
#include "netxfer/errors.hpp"
#include "netxfer/evalx/report.hpp"
#include "netxfer/netsim/rng.hpp"
#include "netxfer/transfer/finetune.hpp"

namespace netxfer::evalx {

void SweepConfig::validate(std::size_t pool_size) const {
  if (counts.empty()) throw ConfigError("sweep: no counts");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) throw ConfigError("sweep: counts must be >= 1");
    if (i > 0 && counts[i] <= counts[i - 1]) throw ConfigError("sweep: counts must be strictly increasing");
    if (counts[i] > pool_size)
      throw ConfigError("sweep: count " + std::to_string(counts[i]) + " exceeds the pool of " + std::to_string(pool_size));
  }
  if (seeds.size() < 3) throw ConfigError("sweep: at least 3 seeds are required");
  if (auto why = transfer::policy_violation(policy)) throw ConfigError("sweep: policy " + policy.code() + ": " + *why);
  scratch_train.validate();
  finetune_train.validate();
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::vector<std::size_t> draw_order(std::size_t pool, std::uint64_t seed) {
  std::vector<std::size_t> order(pool);
  std::iota(order.begin(), order.end(), 0);
  netsim::CounterRng rng(seed, netsim::fnv1a("sweep"));
  for (std::size_t i = pool; i > 1; --i) std::swap(order[i - 1], order[rng.integer(0, static_cast<std::int64_t>(i) - 1)]);
  return order;
}

}  // namespace

EfficiencyCurve efficiency_sweep(const rnmodel::Model& donor, std::span<const dataio::WindowedScenario> pool,
                                 std::span<const dataio::WindowedScenario> validation,
                                 std::span<const dataio::WindowedScenario> evaluation, const SweepConfig& config) {
  config.validate(pool.size());
  const std::size_t seeds = config.seeds.size();
  std::vector<double> scratch(config.counts.size() * seeds), tuned(scratch.size());

  parallel_for(scratch.size(), config.threads, [&](std::size_t cell) {
    const std::size_t c = cell / seeds, s = cell % seeds;
    const std::uint64_t seed = config.seeds[s];
    const auto order = draw_order(pool.size(), seed);
    std::vector<dataio::WindowedScenario> subset;
    for (std::size_t i = 0; i < config.counts[c]; ++i) subset.push_back(pool[order[i]]);

    rnmodel::Model fresh(donor.config(), dataio::fit_normalizer(subset));
    fresh.init(seed);
    auto train_cfg = config.scratch_train;
    train_cfg.seed = seed;
    const auto train_set = rnmodel::prepare_all(subset, fresh.normalizer());
    const auto val_set = rnmodel::prepare_all(validation, fresh.normalizer());
    rnmodel::train(fresh, train_set, val_set, train_cfg);
    scratch[cell] = evaluate(fresh, evaluation).mape;

    auto ft_cfg = config.finetune_train;
    ft_cfg.seed = seed;
    const auto ft = transfer::finetune(donor, subset, validation, transfer::ManualMethod{config.policy}, ft_cfg, seed);
    tuned[cell] = evaluate(ft.model, evaluation).mape;
  });

  EfficiencyCurve curve;
  for (std::size_t c = 0; c < config.counts.size(); ++c) {
    EfficiencyPoint p;
    p.count = config.counts[c];
    p.scratch.assign(scratch.begin() + static_cast<long>(c * seeds), scratch.begin() + static_cast<long>((c + 1) * seeds));
    p.finetuned.assign(tuned.begin() + static_cast<long>(c * seeds), tuned.begin() + static_cast<long>((c + 1) * seeds));
    p.scratch_mape = std::accumulate(p.scratch.begin(), p.scratch.end(), 0.0) / static_cast<double>(seeds);
    p.finetuned_mape = std::accumulate(p.finetuned.begin(), p.finetuned.end(), 0.0) / static_cast<double>(seeds);
    if (c > 0 && p.scratch_mape > curve.points.back().scratch_mape)
      curve.warnings.push_back("scratch MAPE rises from " + std::to_string(curve.points.back().count) + " to " +
                               std::to_string(p.count) + " scenarios");
    curve.points.push_back(std::move(p));
  }
  return curve;
}

void write_curve_csv(std::ostream& out, const EfficiencyCurve& curve) {
  const auto precision = out.precision(10);
  out << "count,scratch_mape,finetuned_mape,advantage,seeds\n";
  for (const auto& p : curve.points)
    out << p.count << ',' << p.scratch_mape << ',' << p.finetuned_mape << ',' << p.advantage() << ',' << p.scratch.size() << '\n';
  out.precision(precision);
}

}  // namespace netxfer::evalx
