#pragma once

#include <array>
#include <vector>

namespace netxfer::transfer {

struct AutoFreezeConfig {
  double eta = 0.5;   // relative gradient-norm threshold
  std::size_t k = 2;  // consecutive epochs below threshold

  void validate() const;
};

// Per-block gradient norm of one epoch, ordered Encoding, MPA, Readout.
using BlockNorms = std::array<double, 3>;
using FreezeState = std::array<bool, 3>;

// Decides the freeze set after the latest epoch. history[0] is the first
// epoch and supplies the reference norm of each block. A block freezes when
// its ratio to the reference stayed below eta for the last k epochs and every
// earlier block is already frozen. Freezing never reverses, and the last
// unfrozen block always stays trainable.
FreezeState autofreeze_update(const std::vector<BlockNorms>& history, FreezeState frozen, const AutoFreezeConfig& config);

}  // namespace netxfer::transfer
