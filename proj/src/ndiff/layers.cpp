#include "netxfer/ndiff/layers.hpp"

#include "netxfer/errors.hpp"

namespace netxfer::ndiff {

Dense make_dense(ParamStore& store, const std::string& name, std::size_t in, std::size_t out, Block block) {
  Dense d;
  d.weight = store.add(name + ".w", {out, in}, block);
  d.bias = store.add(name + ".b", {out}, block);
  d.in = in;
  d.out = out;
  return d;
}

Var Mlp::forward(Tape& tape, Var x) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    x = tape.affine(layers[i].weight, layers[i].bias, x);
    if (i + 1 < layers.size() || activate_last) x = tape.relu(x);
  }
  return x;
}

Mlp make_mlp(ParamStore& store, const std::string& name, std::size_t in, const std::vector<std::size_t>& widths, Block block,
             bool activate_last) {
  if (widths.empty()) throw ConfigError("mlp " + name + ": needs at least one layer");
  Mlp m;
  m.activate_last = activate_last;
  std::size_t prev = in;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (widths[i] == 0) throw ConfigError("mlp " + name + ": zero-width layer");
    m.layers.push_back(make_dense(store, name + "." + std::to_string(i), prev, widths[i], block));
    prev = widths[i];
  }
  return m;
}

GruCell make_gru(ParamStore& store, const std::string& name, std::size_t input, std::size_t hidden, Block block) {
  GruCell c;
  c.input = input;
  c.hidden = hidden;
  c.wz = store.add(name + ".wz", {hidden, input}, block);
  c.uz = store.add(name + ".uz", {hidden, hidden}, block);
  c.bz = store.add(name + ".bz", {hidden}, block);
  c.wr = store.add(name + ".wr", {hidden, input}, block);
  c.ur = store.add(name + ".ur", {hidden, hidden}, block);
  c.br = store.add(name + ".br", {hidden}, block);
  c.wn = store.add(name + ".wn", {hidden, input}, block);
  c.un = store.add(name + ".un", {hidden, hidden}, block);
  c.bn = store.add(name + ".bn", {hidden}, block);
  return c;
}

}  // namespace netxfer::ndiff
