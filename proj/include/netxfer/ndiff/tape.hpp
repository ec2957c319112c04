#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "netxfer/ndiff/param_store.hpp"

namespace netxfer::ndiff {

struct Var {
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t id = kNone;

  bool valid() const { return id != kNone; }
};

struct GruCell;

// Reverse-mode tape over f64 vectors. Every op records its output value and a
// closure that pushes the output gradient back into its inputs. Parameters are
// read from the store by reference and their gradients land in the GradBuffer
// handed to backward(), so the store itself is never written.
//
// Each op checks its output for NaN/Inf and throws NumericError naming the op;
// backward() does the same for gradients.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::span<const double> out_grad)>;

  explicit Tape(const ParamStore& store) : store_(&store) {}

  const ParamStore& store() const { return *store_; }

  Var input(std::vector<double> value);
  Var param(std::size_t index);

  std::span<const double> value(Var v) const { return nodes_[v.id].value; }
  double scalar(Var v) const { return nodes_[v.id].value.front(); }
  std::size_t size(Var v) const { return nodes_[v.id].value.size(); }
  std::size_t node_count() const { return nodes_.size(); }

  // y = W x + b, W stored row-major [out, in].
  Var affine(std::size_t weight, std::size_t bias, Var x);
  Var relu(Var x);
  Var sigmoid(Var x);
  Var tanh(Var x);
  Var softplus(Var x);
  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var x, double k);
  Var sum(std::span<const Var> xs);  // elementwise; all inputs share one size
  Var concat(Var a, Var b);
  Var sum_elements(Var x);           // scalar
  Var dot(Var a, Var b);             // scalar
  Var gru(const GruCell& cell, Var x, Var h);

  // Arbitrary differentiable node. The backward closure receives d(loss)/d(output)
  // and calls accumulate() for each input it depends on.
  Var custom(const char* op, std::vector<double> value, Backward backward);
  void accumulate(Var v, std::span<const double> grad);
  void accumulate_param(std::size_t index, std::span<const double> grad);

  // Seeds d(loss)/d(loss) = 1 on a scalar and runs every recorded closure in
  // reverse. Parameter gradients are added into grads.
  void backward(Var loss, GradBuffer& grads);

  // Gradient of the most recent backward() with respect to a node.
  std::span<const double> grad(Var v) const { return nodes_[v.id].grad; }

 private:
  struct Node {
    const char* op;
    std::vector<double> value;
    std::vector<double> grad;
    Backward backward;
    bool touched = false;
  };

  Var push(const char* op, std::vector<double> value, Backward backward);
  std::vector<double>& grads_of(std::size_t param);

  const ParamStore* store_;
  std::vector<Node> nodes_;
  GradBuffer* grads_ = nullptr;
};

}  // namespace netxfer::ndiff
