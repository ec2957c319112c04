#include "netxfer/transfer/finetune.hpp"

#include <cmath>
#include <map>

#include "netxfer/errors.hpp"
#include "netxfer/overloaded.hpp"

namespace netxfer::transfer {

std::string method_name(const TransferMethod& m) {
  return std::visit(Overloaded{[](const ManualMethod& x) { return "manual:" + x.policy.code(); },
                               [](const AutoFreezeMethod&) { return std::string("autofreeze"); },
                               [](const L2spMethod&) { return std::string("l2sp"); },
                               [](const GtotMethod&) { return std::string("gtot"); }},
                    m);
}

BlockPolicy base_policy(const TransferMethod& m) {
  return std::visit(Overloaded{[](const ManualMethod& x) { return x.policy; },
                               [](const AutoFreezeMethod&) { return kFineTuneAll; },
                               [](const L2spMethod& x) { return x.base; }, [](const GtotMethod& x) { return x.base; }},
                    m);
}

rnmodel::TrainConfig finetune_config(const rnmodel::TrainConfig& donor) {
  rnmodel::TrainConfig c = donor;
  c.lr = donor.lr / 10.0;
  return c;
}

namespace {

using Embeddings = std::vector<std::vector<double>>;

// Post-MPA entity embeddings per window, in gtot_mask order.
std::vector<Embeddings> entity_values(const rnmodel::Model& model, const rnmodel::PreparedScenario& s) {
  ndiff::Tape tape(model.params());
  const auto fw = model.forward(tape, s);
  std::vector<Embeddings> out;
  for (const auto& w : fw.windows) {
    Embeddings e;
    for (const auto* group : {&w.flows, &w.queues, &w.links})
      for (ndiff::Var v : *group) {
        const auto x = tape.value(v);
        e.emplace_back(x.begin(), x.end());
      }
    out.push_back(std::move(e));
  }
  return out;
}

BlockNorms block_grad_norms(const ndiff::ParamStore& store) {
  BlockNorms n{};
  for (const auto& p : store)
    if (p.trainable)
      for (double g : p.grad) n[static_cast<std::size_t>(p.block)] += g * g;
  for (double& x : n) x = std::sqrt(x);
  return n;
}

}  // namespace

FinetuneResult finetune(const rnmodel::Model& donor, std::span<const dataio::WindowedScenario> training,
                        std::span<const dataio::WindowedScenario> validation, const TransferMethod& method,
                        const rnmodel::TrainConfig& config, std::uint64_t seed) {
  const BlockPolicy policy = base_policy(method);
  FinetuneResult result{apply_policy(donor, policy, seed), {}, {}, {}};
  rnmodel::Model& model = result.model;
  const auto train_set = rnmodel::prepare_all(training, donor.normalizer());
  const auto val_set = rnmodel::prepare_all(validation, donor.normalizer());

  std::vector<bool> transferred;
  for (const auto& p : model.params()) transferred.push_back(policy.at(p.block) != Action::Retrain);

  rnmodel::TrainHooks hooks;
  std::map<std::uint64_t, std::vector<Embeddings>> donor_cache;
  BlockNorms epoch_sum{};
  std::size_t epoch_steps = 0;
  FreezeState frozen{};

  std::visit(
      Overloaded{
          [](const ManualMethod&) {},
          [&](const AutoFreezeMethod& m) {
            m.config.validate();
            hooks.before_step = [&](ndiff::ParamStore& store) {
              const BlockNorms n = block_grad_norms(store);
              for (std::size_t b = 0; b < 3; ++b) epoch_sum[b] += n[b];
              ++epoch_steps;
            };
            hooks.epoch_end = [&, cfg = m.config](std::size_t, ndiff::ParamStore& store) {
              BlockNorms mean{};
              for (std::size_t b = 0; b < 3; ++b) mean[b] = epoch_steps ? epoch_sum[b] / static_cast<double>(epoch_steps) : 0.0;
              epoch_sum = {};
              epoch_steps = 0;
              result.grad_norms.push_back(mean);
              frozen = autofreeze_update(result.grad_norms, frozen, cfg);
              for (std::size_t b = 0; b < 3; ++b)
                if (frozen[b]) store.set_block_trainable(ndiff::kBlocks[b], false);
              result.freeze_states.push_back(frozen);
            };
          },
          [&](const L2spMethod& m) {
            m.config.validate();
            hooks.before_step = [&, cfg = m.config](ndiff::ParamStore& store) {
              l2sp_add_gradient(store, donor.params(), transferred, cfg);
            };
          },
          [&](const GtotMethod& m) {
            m.config.validate();
            for (const auto& s : train_set) donor_cache.emplace(s.scenario_id, entity_values(donor, s));
            hooks.extra_loss = [&, cfg = m.config](ndiff::Tape& tape, const rnmodel::PreparedScenario& s,
                                                   const rnmodel::ScenarioForward& fw, double batch_weight) {
              const auto& cached = donor_cache.at(s.scenario_id);
              std::vector<ndiff::Var> terms;
              for (std::size_t w = 0; w < s.windows.size(); ++w) {
                std::vector<ndiff::Var> entities;
                for (const auto* group : {&fw.windows[w].flows, &fw.windows[w].queues, &fw.windows[w].links})
                  entities.insert(entities.end(), group->begin(), group->end());
                terms.push_back(gtot_distance(tape, entities, cached[w], gtot_mask(s, s.windows[w]), cfg));
              }
              if (terms.empty()) return ndiff::Var{};
              const double weight = cfg.lambda * batch_weight / static_cast<double>(terms.size());
              return tape.scale(terms.size() == 1 ? terms[0] : tape.sum(terms), weight);
            };
          }},
      method);

  result.history = rnmodel::train(model, train_set, val_set, config, hooks);
  return result;
}

}  // namespace netxfer::transfer
