#include "netxfer/rnmodel/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "netxfer/errors.hpp"
#include "netxfer/ndiff/optimizer.hpp"
#include "netxfer/netsim/rng.hpp"

namespace netxfer::rnmodel {

void TrainConfig::validate() const {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("train: lr must be a finite value >= 0");
  if (batch_size == 0) throw ConfigError("train: batch_size must be >= 1");
}

namespace {

using Snapshot = std::vector<std::vector<double>>;

Snapshot snapshot(const ndiff::ParamStore& store) {
  Snapshot s;
  s.reserve(store.size());
  for (const auto& p : store) s.push_back(p.value);
  return s;
}

void restore(ndiff::ParamStore& store, const Snapshot& s) {
  for (std::size_t i = 0; i < store.size(); ++i) store[i].value = s[i];
}

std::vector<std::size_t> shuffled(std::size_t n, std::uint64_t seed, std::uint64_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  netsim::CounterRng rng(seed, epoch);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.integer(0, i - 1)]);
  return order;
}

}  // namespace

double evaluate_loss(const Model& model, std::span<const PreparedScenario> scenarios) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& s : scenarios) {
    const auto pred = model.predict(s);
    for (std::size_t w = 0; w < s.windows.size(); ++w) {
      const auto& targets = s.windows[w].targets;
      for (std::size_t i = 0; i < targets.size(); ++i) total += std::abs(pred[w][i] - targets[i]) / targets[i];
      count += targets.size();
    }
  }
  if (count == 0) throw DataError("evaluate: no active flow-windows");
  return total / static_cast<double>(count);
}

TrainHistory train(Model& model, std::span<const PreparedScenario> training, std::span<const PreparedScenario> validation,
                   const TrainConfig& config, const TrainHooks& hooks) {
  config.validate();
  if (training.empty()) throw DataError("train: empty training split");
  if (validation.empty()) throw DataError("train: empty validation split");
  auto& store = model.params();
  if (store.trainable_count() == 0) throw ConfigError("no trainable parameters");

  TrainHistory history;
  history.best_val_loss = evaluate_loss(model, validation);
  history.epochs.push_back({0, evaluate_loss(model, training), history.best_val_loss});
  Snapshot best = snapshot(store);

  ndiff::Adam adam(store, {.lr = config.lr});
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto order = shuffled(training.size(), config.seed, epoch);
    double epoch_error = 0.0;
    std::size_t epoch_count = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::size_t batch_active = 0;
      for (std::size_t k = start; k < end; ++k) batch_active += training[order[k]].active_count();
      if (batch_active == 0) continue;
      const double weight = 1.0 / static_cast<double>(batch_active);
      const double batch_weight = 1.0 / static_cast<double>(end - start);

      ndiff::GradBuffer grads = store.make_grad_buffer();
      for (std::size_t k = start; k < end; ++k) {
        const PreparedScenario& s = training[order[k]];
        try {
          ndiff::Tape tape(store);
          const ScenarioForward fw = model.forward(tape, s);
          std::vector<ndiff::Var> terms;
          for (std::size_t w = 0; w < s.windows.size(); ++w)
            if (fw.windows[w].predictions.valid())
              terms.push_back(relative_error_sum(tape, fw.windows[w].predictions, s.windows[w].targets, weight));
          if (hooks.extra_loss) {
            const ndiff::Var extra = hooks.extra_loss(tape, s, fw, batch_weight);
            if (extra.valid()) terms.push_back(extra);
          }
          if (terms.empty()) continue;
          const ndiff::Var data = terms.size() == 1 ? terms[0] : tape.sum(terms);
          tape.backward(data, grads);
          for (std::size_t w = 0, t = 0; w < s.windows.size(); ++w)
            if (fw.windows[w].predictions.valid()) epoch_error += tape.scalar(terms[t++]) / weight;
          epoch_count += s.active_count();
        } catch (const NumericError& e) {
          throw NumericError("train: epoch " + std::to_string(epoch) + ", scenario " + std::to_string(s.scenario_id) +
                             ": " + e.what());
        }
      }
      store.accumulate(grads);
      if (hooks.before_step) hooks.before_step(store);
      adam.step(store);
    }

    const double val = evaluate_loss(model, validation);
    if (!std::isfinite(val)) throw NumericError("train: non-finite validation loss at epoch " + std::to_string(epoch));
    history.epochs.push_back({epoch, epoch_count ? epoch_error / static_cast<double>(epoch_count) : 0.0, val});
    if (hooks.epoch_end) hooks.epoch_end(epoch, store);
    if (val < history.best_val_loss) {
      history.best_val_loss = val;
      history.best_epoch = epoch;
      best = snapshot(store);
    } else if (epoch - history.best_epoch >= config.patience) {
      break;
    }
  }
  restore(store, best);
  return history;
}

void write_history_csv(std::ostream& out, const TrainHistory& history) {
  out << "epoch,train_loss,val_loss\n";
  const auto precision = out.precision(17);
  for (const auto& e : history.epochs) out << e.epoch << ',' << e.train_loss << ',' << e.val_loss << '\n';
  out.precision(precision);
}

}  // namespace netxfer::rnmodel
