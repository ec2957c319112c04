#include "netxfer/transfer/l2sp.hpp"

#include "netxfer/errors.hpp"

namespace netxfer::transfer {

void L2spConfig::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigError("l2sp: alpha and beta must be >= 0");
}

namespace {

const ndiff::Parameter& donor_of(const ndiff::ParamStore& donor, const ndiff::Parameter& p) {
  const auto& d = donor[donor.index_of(p.name)];
  if (d.shape != p.shape) throw ConfigError("l2sp: shape mismatch for " + p.name);
  return d;
}

void check_mask(const ndiff::ParamStore& receiver, const std::vector<bool>& transferred) {
  if (transferred.size() != receiver.size()) throw ConfigError("l2sp: transfer mask does not match the model");
}

}  // namespace

double l2sp_penalty(const ndiff::ParamStore& receiver, const ndiff::ParamStore& donor, const std::vector<bool>& transferred,
                    const L2spConfig& config) {
  config.validate();
  check_mask(receiver, transferred);
  double near = 0.0, fresh = 0.0;
  for (std::size_t i = 0; i < receiver.size(); ++i) {
    const auto& p = receiver[i];
    if (transferred[i]) {
      const auto& d = donor_of(donor, p);
      for (std::size_t k = 0; k < p.size(); ++k) near += (p.value[k] - d.value[k]) * (p.value[k] - d.value[k]);
    } else {
      for (double w : p.value) fresh += w * w;
    }
  }
  return 0.5 * config.alpha * near + 0.5 * config.beta * fresh;
}

void l2sp_add_gradient(ndiff::ParamStore& receiver, const ndiff::ParamStore& donor, const std::vector<bool>& transferred,
                       const L2spConfig& config) {
  config.validate();
  check_mask(receiver, transferred);
  for (std::size_t i = 0; i < receiver.size(); ++i) {
    auto& p = receiver[i];
    if (!p.trainable) continue;
    if (transferred[i]) {
      const auto& d = donor_of(donor, p);
      for (std::size_t k = 0; k < p.size(); ++k) p.grad[k] += config.alpha * (p.value[k] - d.value[k]);
    } else {
      for (std::size_t k = 0; k < p.size(); ++k) p.grad[k] += config.beta * p.value[k];
    }
  }
}

}  // namespace netxfer::transfer
