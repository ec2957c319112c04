#pragma once

#include <string>
#include <vector>

#include "netxfer/ndiff/param_store.hpp"
#include "netxfer/ndiff/tape.hpp"

namespace netxfer::ndiff {

struct Dense {
  std::size_t weight = 0;  // [out, in]
  std::size_t bias = 0;    // [out]
  std::size_t in = 0;
  std::size_t out = 0;
};

Dense make_dense(ParamStore& store, const std::string& name, std::size_t in, std::size_t out, Block block);

// Affine layers with ReLU between them. The last layer is linear unless
// activate_last is set.
struct Mlp {
  std::vector<Dense> layers;
  bool activate_last = false;

  std::size_t in() const { return layers.front().in; }
  std::size_t out() const { return layers.back().out; }
  Var forward(Tape& tape, Var x) const;
};

Mlp make_mlp(ParamStore& store, const std::string& name, std::size_t in, const std::vector<std::size_t>& widths, Block block,
             bool activate_last);

// z = sigmoid(Wz x + Uz h + bz)
// r = sigmoid(Wr x + Ur h + br)
// n = tanh(Wn x + Un (r * h) + bn)
// h' = (1 - z) * n + z * h
struct GruCell {
  std::size_t wz, uz, bz;
  std::size_t wr, ur, br;
  std::size_t wn, un, bn;
  std::size_t input = 0;
  std::size_t hidden = 0;

  Var forward(Tape& tape, Var x, Var h) const { return tape.gru(*this, x, h); }
};

GruCell make_gru(ParamStore& store, const std::string& name, std::size_t input, std::size_t hidden, Block block);

}  // namespace netxfer::ndiff
