#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "netxfer/dataio/windows.hpp"
#include "netxfer/rnmodel/train.hpp"
#include "netxfer/transfer/autofreeze.hpp"
#include "netxfer/transfer/gtot.hpp"
#include "netxfer/transfer/l2sp.hpp"
#include "netxfer/transfer/policy.hpp"

namespace netxfer::transfer {

inline constexpr BlockPolicy kFineTuneAll{Action::FineTune, Action::FineTune, Action::FineTune};

struct ManualMethod {
  BlockPolicy policy;
};
// Starts from all donor weights trainable.
struct AutoFreezeMethod {
  AutoFreezeConfig config;
};
struct L2spMethod {
  L2spConfig config;
  BlockPolicy base = kFineTuneAll;
};
struct GtotMethod {
  GtotConfig config;
  BlockPolicy base = kFineTuneAll;
};
using TransferMethod = std::variant<ManualMethod, AutoFreezeMethod, L2spMethod, GtotMethod>;

// "manual:FTR", "autofreeze", "l2sp", "gtot".
std::string method_name(const TransferMethod& m);
BlockPolicy base_policy(const TransferMethod& m);

struct FinetuneResult {
  rnmodel::Model model;
  rnmodel::TrainHistory history;
  // AutoFreeze only: per-epoch block gradient norms and the freeze set after each epoch.
  std::vector<BlockNorms> grad_norms;
  std::vector<FreezeState> freeze_states;
};

// Donor learning rate divided by ten.
rnmodel::TrainConfig finetune_config(const rnmodel::TrainConfig& donor);

// Applies the method's starting policy to the donor, then trains on real
// data normalized with the donor's statistics. Optimizer state starts fresh.
FinetuneResult finetune(const rnmodel::Model& donor, std::span<const dataio::WindowedScenario> training,
                        std::span<const dataio::WindowedScenario> validation, const TransferMethod& method,
                        const rnmodel::TrainConfig& config, std::uint64_t seed);

}  // namespace netxfer::transfer
