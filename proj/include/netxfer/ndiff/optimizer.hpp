#pragma once

#include <cstdint>
#include <vector>

#include "netxfer/ndiff/param_store.hpp"

namespace netxfer::ndiff {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam. Moments are kept for every parameter but only trainable
// ones are updated; frozen parameters stay bitwise untouched.
class Adam {
 public:
  Adam(const ParamStore& store, AdamConfig config);

  // Applies one update from store grads, then zeroes all grads. Throws
  // ConfigError("no trainable parameters") when everything is frozen.
  void step(ParamStore& store);

  std::uint64_t steps() const { return step_; }
  const AdamConfig& config() const { return config_; }
  void set_lr(double lr) { config_.lr = lr; }

 private:
  AdamConfig config_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::uint64_t step_ = 0;
};

}  // namespace netxfer::ndiff
