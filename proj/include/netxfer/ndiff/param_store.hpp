#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace netxfer::ndiff {

// The three transfer units of the model.
enum class Block { Encoding = 0, Mpa = 1, Readout = 2 };
inline constexpr std::array<Block, 3> kBlocks{Block::Encoding, Block::Mpa, Block::Readout};

std::string_view to_string(Block b);
Block block_from_string(std::string_view s);

struct Parameter {
  std::string name;
  std::vector<std::size_t> shape;  // {rows, cols} for matrices, {n} for vectors
  std::vector<double> value;
  std::vector<double> grad;
  Block block = Block::Encoding;
  bool trainable = true;

  std::size_t size() const { return value.size(); }
  std::size_t rows() const { return shape.front(); }
  std::size_t cols() const { return shape.size() > 1 ? shape[1] : 1; }
};

// Per-parameter gradient accumulators, aligned with ParamStore indices. Lets
// several scenarios be differentiated independently and summed in a fixed order.
using GradBuffer = std::vector<std::vector<double>>;

class ParamStore {
 public:
  // Throws ConfigError on duplicate names or empty shapes.
  std::size_t add(std::string name, std::vector<std::size_t> shape, Block block);

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  std::size_t index_of(std::string_view name) const;  // throws ConfigError
  bool contains(std::string_view name) const { return index_.find(name) != index_.end(); }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad();
  void set_block_trainable(Block b, bool trainable);
  bool block_trainable(Block b) const;  // true if any parameter of the block is trainable
  std::size_t trainable_count() const;
  std::vector<std::size_t> block_indices(Block b) const;

  GradBuffer make_grad_buffer() const;
  // store.grad += buffer
  void accumulate(const GradBuffer& buffer);

  // Values only; names, shapes and blocks must match.
  void copy_values_from(const ParamStore& other);

 private:
  std::vector<Parameter> params_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Uniform in +-sqrt(6 / (fan_in + fan_out)) for matrices, zeros for vectors.
// Each parameter draws from a stream keyed by (seed, name), so re-initializing
// a subset reproduces exactly what a full initialization would give it.
void glorot_init(ParamStore& store, std::uint64_t seed);
void glorot_init(ParamStore& store, std::uint64_t seed, Block only);

}  // namespace netxfer::ndiff
