#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netxfer/ndiff/param_store.hpp"
#include "netxfer/rnmodel/model.hpp"

namespace netxfer::transfer {

// Ordered: Freeze < FineTune < Retrain.
enum class Action { Freeze = 0, FineTune = 1, Retrain = 2 };

char action_letter(Action a);  // F, T, R

struct BlockPolicy {
  Action encoding = Action::FineTune;
  Action mpa = Action::FineTune;
  Action readout = Action::FineTune;

  Action at(ndiff::Block b) const;
  std::string code() const;  // e.g. "FTR", ordered Encoding-MPA-Readout
  friend bool operator==(const BlockPolicy&, const BlockPolicy&) = default;
};

// Which guideline a policy breaks, if any:
//   all blocks frozen; all blocks re-trained; a block frozen or fine-tuned
//   after an earlier block that is re-trained or fine-tuned respectively.
std::optional<std::string> policy_violation(const BlockPolicy& p);

// FFT, FFR, FTT, FTR, FRR, TTT, TTR, TRR.
std::vector<BlockPolicy> enumerate_valid_policies();

// Parses a 3-letter code; ConfigError listing the valid codes otherwise.
BlockPolicy parse_policy(std::string_view code);

// Receiver initialized from the donor: Freeze copies and locks, FineTune
// copies, Retrain re-draws the block from seed. The receiver keeps the
// donor's normalizer. ConfigError on an invalid policy.
rnmodel::Model apply_policy(const rnmodel::Model& donor, const BlockPolicy& policy, std::uint64_t seed);

}  // namespace netxfer::transfer
