#include "netxfer/transfer/policy.hpp"

#include "netxfer/errors.hpp"

namespace netxfer::transfer {

char action_letter(Action a) {
  switch (a) {
    case Action::Freeze: return 'F';
    case Action::FineTune: return 'T';
    case Action::Retrain: return 'R';
  }
  return '?';
}

Action BlockPolicy::at(ndiff::Block b) const {
  switch (b) {
    case ndiff::Block::Encoding: return encoding;
    case ndiff::Block::Mpa: return mpa;
    case ndiff::Block::Readout: return readout;
  }
  return readout;
}

std::string BlockPolicy::code() const { return {action_letter(encoding), action_letter(mpa), action_letter(readout)}; }

std::optional<std::string> policy_violation(const BlockPolicy& p) {
  const Action a[] = {p.encoding, p.mpa, p.readout};
  if (a[0] == Action::Freeze && a[1] == Action::Freeze && a[2] == Action::Freeze) return "never freeze all blocks";
  if (a[0] == Action::Retrain && a[1] == Action::Retrain && a[2] == Action::Retrain) return "never re-train all blocks";
  for (int i = 1; i < 3; ++i)
    if (a[i] < a[i - 1])
      return "layer dependencies: " + std::string(ndiff::to_string(ndiff::kBlocks[i])) + " cannot be " +
             (a[i] == Action::Freeze ? "frozen" : "fine-tuned") + " after " + std::string(ndiff::to_string(ndiff::kBlocks[i - 1])) +
             " is " + (a[i - 1] == Action::Retrain ? "re-trained" : "fine-tuned");
  return std::nullopt;
}

std::vector<BlockPolicy> enumerate_valid_policies() {
  std::vector<BlockPolicy> out;
  constexpr Action all[] = {Action::Freeze, Action::FineTune, Action::Retrain};
  for (Action e : all)
    for (Action m : all)
      for (Action r : all) {
        const BlockPolicy p{e, m, r};
        if (!policy_violation(p)) out.push_back(p);
      }
  return out;
}

BlockPolicy parse_policy(std::string_view code) {
  auto fail = [&](const std::string& why) {
    std::string valid;
    for (const auto& p : enumerate_valid_policies()) valid += (valid.empty() ? "" : ", ") + p.code();
    return ConfigError("invalid policy '" + std::string(code) + "' (" + why + "); valid codes: " + valid);
  };
  if (code.size() != 3) throw fail("expected 3 letters");
  Action a[3];
  for (int i = 0; i < 3; ++i) {
    switch (code[i]) {
      case 'F': a[i] = Action::Freeze; break;
      case 'T': a[i] = Action::FineTune; break;
      case 'R': a[i] = Action::Retrain; break;
      default: throw fail("letters must be F, T or R");
    }
  }
  const BlockPolicy p{a[0], a[1], a[2]};
  if (auto why = policy_violation(p)) throw fail(*why);
  return p;
}

rnmodel::Model apply_policy(const rnmodel::Model& donor, const BlockPolicy& policy, std::uint64_t seed) {
  if (auto why = policy_violation(policy)) throw ConfigError("policy " + policy.code() + ": " + *why);
  rnmodel::Model receiver = donor;
  auto& store = receiver.params();
  for (ndiff::Block b : ndiff::kBlocks) {
    if (store.block_indices(b).empty()) throw ConfigError("policy: model has no " + std::string(ndiff::to_string(b)) + " block");
    const Action a = policy.at(b);
    if (a == Action::Retrain) ndiff::glorot_init(store, seed, b);
    store.set_block_trainable(b, a != Action::Freeze);
  }
  store.zero_grad();
  return receiver;
}

}  // namespace netxfer::transfer
