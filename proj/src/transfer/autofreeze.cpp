#include "netxfer/transfer/autofreeze.hpp"

#include <cmath>

#include "netxfer/errors.hpp"

namespace netxfer::transfer {

void AutoFreezeConfig::validate() const {
  if (!(eta >= 0.0)) throw ConfigError("autofreeze: eta must be >= 0");
  if (k < 1) throw ConfigError("autofreeze: k must be >= 1");
}

FreezeState autofreeze_update(const std::vector<BlockNorms>& history, FreezeState frozen, const AutoFreezeConfig& config) {
  config.validate();
  if (history.size() < config.k) return frozen;
  for (std::size_t b = 0; b < 3; ++b) {
    if (frozen[b]) continue;
    // Earlier blocks feed later ones, so the frozen set stays a prefix.
    if (b > 0 && !frozen[b - 1]) break;
    std::size_t unfrozen = 0;
    for (bool f : frozen) unfrozen += f ? 0 : 1;
    if (unfrozen <= 1) break;
    const double reference = history.front()[b];
    bool below = true;
    for (std::size_t e = history.size() - config.k; e < history.size() && below; ++e) {
      const double ratio = reference > 0.0 ? history[e][b] / reference : 0.0;
      below = ratio < config.eta;
    }
    if (!below) break;
    frozen[b] = true;
  }
  return frozen;
}

}  // namespace netxfer::transfer
