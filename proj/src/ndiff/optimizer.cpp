#include "netxfer/ndiff/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "netxfer/errors.hpp"

namespace netxfer::ndiff {

Adam::Adam(const ParamStore& store, AdamConfig config) : config_(config) {
  for (const auto& p : store) {
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void Adam::step(ParamStore& store) {
  if (store.size() != m_.size()) throw ConfigError("adam: parameter store changed shape");
  if (store.trainable_count() == 0) throw ConfigError("no trainable parameters");
  ++step_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < store.size(); ++i) {
    Parameter& p = store[i];
    if (p.trainable) {
      auto& m = m_[i];
      auto& v = v_[i];
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double g = p.grad[k];
        m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * g;
        v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * g * g;
        p.value[k] -= config_.lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + config_.eps);
      }
    }
    std::fill(p.grad.begin(), p.grad.end(), 0.0);
  }
}

}  // namespace netxfer::ndiff
