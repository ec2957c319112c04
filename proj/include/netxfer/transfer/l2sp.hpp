#pragma once

#include <vector>

#include "netxfer/ndiff/param_store.hpp"

namespace netxfer::transfer {

struct L2spConfig {
  double alpha = 1e-2;  // pull toward donor weights
  double beta = 1e-2;   // plain decay on freshly initialized weights

  void validate() const;
};

// transferred[i] marks receiver parameter i as starting from donor weights.
// Donor parameters are matched by name; ConfigError on a missing name or
// shape mismatch.
//   (alpha/2) * sum_transferred |w - w0|^2 + (beta/2) * sum_fresh |w|^2
double l2sp_penalty(const ndiff::ParamStore& receiver, const ndiff::ParamStore& donor, const std::vector<bool>& transferred,
                    const L2spConfig& config);

// Adds the penalty gradient into receiver grads of trainable parameters.
void l2sp_add_gradient(ndiff::ParamStore& receiver, const ndiff::ParamStore& donor, const std::vector<bool>& transferred,
                       const L2spConfig& config);

}  // namespace netxfer::transfer
