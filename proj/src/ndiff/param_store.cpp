#include "netxfer/ndiff/param_store.hpp"

#include <algorithm>
#include <cmath>

#include "netxfer/errors.hpp"
#include "netxfer/netsim/rng.hpp"

namespace netxfer::ndiff {

std::string_view to_string(Block b) {
  switch (b) {
    case Block::Encoding:
      return "encoding";
    case Block::Mpa:
      return "mpa";
    case Block::Readout:
      return "readout";
  }
  return "?";
}

Block block_from_string(std::string_view s) {
  for (Block b : kBlocks)
    if (to_string(b) == s) return b;
  throw ConfigError("unknown block '" + std::string(s) + "'");
}

std::size_t ParamStore::add(std::string name, std::vector<std::size_t> shape, Block block) {
  if (shape.empty() || shape.size() > 2) throw ConfigError("parameter " + name + ": shape must have rank 1 or 2");
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  if (n == 0) throw ConfigError("parameter " + name + ": zero-sized shape");
  if (contains(name)) throw ConfigError("parameter " + name + " already exists");
  const std::size_t index = params_.size();
  index_.emplace(name, index);
  params_.push_back(Parameter{std::move(name), std::move(shape), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), block, true});
  return index;
}

std::size_t ParamStore::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter '" + std::string(name) + "'");
  return it->second;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) std::fill(p.grad.begin(), p.grad.end(), 0.0);
}

void ParamStore::set_block_trainable(Block b, bool trainable) {
  for (auto& p : params_)
    if (p.block == b) p.trainable = trainable;
}

bool ParamStore::block_trainable(Block b) const {
  return std::any_of(params_.begin(), params_.end(), [&](const Parameter& p) { return p.block == b && p.trainable; });
}

std::size_t ParamStore::trainable_count() const {
  return static_cast<std::size_t>(std::count_if(params_.begin(), params_.end(), [](const Parameter& p) { return p.trainable; }));
}

std::vector<std::size_t> ParamStore::block_indices(Block b) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (params_[i].block == b) out.push_back(i);
  return out;
}

GradBuffer ParamStore::make_grad_buffer() const {
  GradBuffer g(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) g[i].assign(params_[i].size(), 0.0);
  return g;
}

void ParamStore::accumulate(const GradBuffer& buffer) {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& g = params_[i].grad;
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += buffer[i][k];
  }
}

void ParamStore::copy_values_from(const ParamStore& other) {
  if (other.size() != size()) throw ConfigError("parameter stores differ in size");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (other[i].name != params_[i].name || other[i].shape != params_[i].shape)
      throw ConfigError("parameter mismatch at " + params_[i].name);
    params_[i].value = other[i].value;
  }
}

namespace {

void init_one(Parameter& p, std::uint64_t seed) {
  if (p.shape.size() == 1) {
    std::fill(p.value.begin(), p.value.end(), 0.0);
    return;
  }
  const double limit = std::sqrt(6.0 / static_cast<double>(p.rows() + p.cols()));
  netsim::CounterRng rng(seed, netsim::fnv1a(p.name));
  for (double& v : p.value) v = rng.uniform(-limit, limit);
}

}  // namespace

void glorot_init(ParamStore& store, std::uint64_t seed) {
  for (auto& p : store) init_one(p, seed);
}

void glorot_init(ParamStore& store, std::uint64_t seed, Block only) {
  for (auto& p : store)
    if (p.block == only) init_one(p, seed);
}

}  // namespace netxfer::ndiff
