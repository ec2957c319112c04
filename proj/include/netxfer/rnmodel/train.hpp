#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "netxfer/rnmodel/model.hpp"

namespace netxfer::rnmodel {

struct TrainConfig {
  double lr = 1e-3;
  std::size_t max_epochs = 200;
  std::size_t patience = 20;
  std::size_t batch_size = 8;  // scenarios per optimizer step
  std::uint64_t seed = 1;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // masked MAPE, fraction
  double val_loss = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;  // epoch 0 is the untrained starting point
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
};

// Optional per-method extensions of the training loop.
struct TrainHooks {
  // Extra differentiable term for one training scenario. batch_weight is
  // 1 / (scenarios in the minibatch).
  std::function<ndiff::Var(ndiff::Tape&, const PreparedScenario&, const ScenarioForward&, double batch_weight)> extra_loss;
  // Runs after a minibatch gradient lands in the store, before the update.
  std::function<void(ndiff::ParamStore&)> before_step;
  // Runs after each epoch's validation pass.
  std::function<void(std::size_t epoch, ndiff::ParamStore&)> epoch_end;
};

// Minibatch Adam on masked MAPE with early stopping. The model ends holding
// the parameters of the best validation epoch (epoch 0 included).
// Throws DataError on empty splits, ConfigError when nothing is trainable,
// NumericError (with epoch and scenario) on non-finite values.
TrainHistory train(Model& model, std::span<const PreparedScenario> training, std::span<const PreparedScenario> validation,
                   const TrainConfig& config, const TrainHooks& hooks = {});

// Masked MAPE (fraction) over every active flow-window of the scenarios.
double evaluate_loss(const Model& model, std::span<const PreparedScenario> scenarios);

// Columns: epoch,train_loss,val_loss
void write_history_csv(std::ostream& out, const TrainHistory& history);

}  // namespace netxfer::rnmodel
