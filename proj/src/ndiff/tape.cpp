#include "netxfer/ndiff/tape.hpp"

#include <cmath>
#include <string>

#include "netxfer/errors.hpp"
#include "netxfer/ndiff/layers.hpp"

namespace netxfer::ndiff {
namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// out += W x
void matvec_add(const Parameter& w, std::span<const double> x, std::span<double> out) {
  const std::size_t cols = w.cols();
  const double* row = w.value.data();
  for (std::size_t r = 0; r < out.size(); ++r, row += cols) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    out[r] += acc;
  }
}

// out += W^T g
void matvec_t_add(const Parameter& w, std::span<const double> g, std::span<double> out) {
  const std::size_t cols = w.cols();
  const double* row = w.value.data();
  for (std::size_t r = 0; r < g.size(); ++r, row += cols) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) out[c] += row[c] * gr;
  }
}

// dW += g x^T
void outer_add(std::vector<double>& dw, std::size_t cols, std::span<const double> g, std::span<const double> x) {
  double* row = dw.data();
  for (std::size_t r = 0; r < g.size(); ++r, row += cols) {
    const double gr = g[r];
    if (gr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) row[c] += gr * x[c];
  }
}

void add_into(std::vector<double>& dst, std::span<const double> src) {
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
}

double sigmoid_of(double a) { return a >= 0.0 ? 1.0 / (1.0 + std::exp(-a)) : std::exp(a) / (1.0 + std::exp(a)); }

}  // namespace

Var Tape::push(const char* op, std::vector<double> value, Backward backward) {
  if (!all_finite(value)) throw NumericError(std::string("non-finite value in forward op '") + op + "'");
  nodes_.push_back(Node{op, std::move(value), {}, std::move(backward), false});
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

std::vector<double>& Tape::grads_of(std::size_t param) { return (*grads_)[param]; }

void Tape::accumulate(Var v, std::span<const double> grad) {
  Node& n = nodes_[v.id];
  if (!n.touched) {
    n.grad.assign(n.value.size(), 0.0);
    n.touched = true;
  }
  add_into(n.grad, grad);
}

void Tape::accumulate_param(std::size_t index, std::span<const double> grad) { add_into(grads_of(index), grad); }

Var Tape::input(std::vector<double> value) { return push("input", std::move(value), nullptr); }

Var Tape::param(std::size_t index) {
  return push("param", (*store_)[index].value, [index](Tape& t, std::span<const double> g) { t.accumulate_param(index, g); });
}

Var Tape::custom(const char* op, std::vector<double> value, Backward backward) {
  return push(op, std::move(value), std::move(backward));
}

Var Tape::affine(std::size_t weight, std::size_t bias, Var x) {
  const Parameter& w = (*store_)[weight];
  const Parameter& b = (*store_)[bias];
  if (w.cols() != size(x) || w.rows() != b.size())
    throw ConfigError("affine: " + w.name + " expects input " + std::to_string(w.cols()) + ", got " + std::to_string(size(x)));
  std::vector<double> y = b.value;
  matvec_add(w, value(x), y);
  return push("affine", std::move(y), [weight, bias, x](Tape& t, std::span<const double> g) {
    const Parameter& w = (*t.store_)[weight];
    outer_add(t.grads_of(weight), w.cols(), g, t.value(x));
    add_into(t.grads_of(bias), g);
    std::vector<double> dx(w.cols(), 0.0);
    matvec_t_add(w, g, dx);
    t.accumulate(x, dx);
  });
}

Var Tape::relu(Var x) {
  std::vector<double> y(value(x).begin(), value(x).end());
  for (double& v : y) v = v > 0.0 ? v : 0.0;
  return push("relu", std::move(y), [x](Tape& t, std::span<const double> g) {
    const auto xv = t.value(x);
    std::vector<double> dx(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] = xv[i] > 0.0 ? g[i] : 0.0;
    t.accumulate(x, dx);
  });
}

Var Tape::sigmoid(Var x) {
  std::vector<double> y(value(x).begin(), value(x).end());
  for (double& v : y) v = sigmoid_of(v);
  const Var out{static_cast<std::uint32_t>(nodes_.size())};
  return push("sigmoid", std::move(y), [x, out](Tape& t, std::span<const double> g) {
    const auto yv = t.value(out);
    std::vector<double> dx(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] = g[i] * yv[i] * (1.0 - yv[i]);
    t.accumulate(x, dx);
  });
}

Var Tape::tanh(Var x) {
  std::vector<double> y(value(x).begin(), value(x).end());
  for (double& v : y) v = std::tanh(v);
  const Var out{static_cast<std::uint32_t>(nodes_.size())};
  return push("tanh", std::move(y), [x, out](Tape& t, std::span<const double> g) {
    const auto yv = t.value(out);
    std::vector<double> dx(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] = g[i] * (1.0 - yv[i] * yv[i]);
    t.accumulate(x, dx);
  });
}

Var Tape::softplus(Var x) {
  std::vector<double> y(value(x).begin(), value(x).end());
  for (double& v : y) v = v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
  return push("softplus", std::move(y), [x](Tape& t, std::span<const double> g) {
    const auto xv = t.value(x);
    std::vector<double> dx(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) dx[i] = g[i] * sigmoid_of(xv[i]);
    t.accumulate(x, dx);
  });
}

Var Tape::add(Var a, Var b) {
  if (size(a) != size(b)) throw ConfigError("add: size mismatch");
  std::vector<double> y(value(a).begin(), value(a).end());
  const auto bv = value(b);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
  return push("add", std::move(y), [a, b](Tape& t, std::span<const double> g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var Tape::mul(Var a, Var b) {
  if (size(a) != size(b)) throw ConfigError("mul: size mismatch");
  std::vector<double> y(value(a).begin(), value(a).end());
  const auto bv = value(b);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
  return push("mul", std::move(y), [a, b](Tape& t, std::span<const double> g) {
    const auto av = t.value(a);
    const auto bv = t.value(b);
    std::vector<double> da(g.size()), db(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      da[i] = g[i] * bv[i];
      db[i] = g[i] * av[i];
    }
    t.accumulate(a, da);
    t.accumulate(b, db);
  });
}

Var Tape::scale(Var x, double k) {
  std::vector<double> y(value(x).begin(), value(x).end());
  for (double& v : y) v *= k;
  return push("scale", std::move(y), [x, k](Tape& t, std::span<const double> g) {
    std::vector<double> dx(g.begin(), g.end());
    for (double& v : dx) v *= k;
    t.accumulate(x, dx);
  });
}

Var Tape::sum(std::span<const Var> xs) {
  if (xs.empty()) throw ConfigError("sum: no inputs");
  std::vector<double> y(value(xs[0]).begin(), value(xs[0]).end());
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (size(xs[k]) != y.size()) throw ConfigError("sum: size mismatch");
    const auto v = value(xs[k]);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += v[i];
  }
  return push("sum", std::move(y), [inputs = std::vector<Var>(xs.begin(), xs.end())](Tape& t, std::span<const double> g) {
    for (Var v : inputs) t.accumulate(v, g);
  });
}

Var Tape::concat(Var a, Var b) {
  std::vector<double> y(value(a).begin(), value(a).end());
  y.insert(y.end(), value(b).begin(), value(b).end());
  const std::size_t na = size(a);
  return push("concat", std::move(y), [a, b, na](Tape& t, std::span<const double> g) {
    t.accumulate(a, g.first(na));
    t.accumulate(b, g.subspan(na));
  });
}

Var Tape::sum_elements(Var x) {
  double s = 0.0;
  for (double v : value(x)) s += v;
  return push("sum_elements", {s}, [x](Tape& t, std::span<const double> g) {
    std::vector<double> dx(t.size(x), g[0]);
    t.accumulate(x, dx);
  });
}

Var Tape::dot(Var a, Var b) {
  if (size(a) != size(b)) throw ConfigError("dot: size mismatch");
  double s = 0.0;
  const auto av = value(a);
  const auto bv = value(b);
  for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
  return push("dot", {s}, [a, b](Tape& t, std::span<const double> g) {
    const auto av = t.value(a);
    const auto bv = t.value(b);
    std::vector<double> da(av.size()), db(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) {
      da[i] = g[0] * bv[i];
      db[i] = g[0] * av[i];
    }
    t.accumulate(a, da);
    t.accumulate(b, db);
  });
}

Var Tape::gru(const GruCell& cell, Var x, Var h) {
  const std::size_t H = cell.hidden;
  if (size(x) != cell.input || size(h) != H)
    throw ConfigError("gru: expected input " + std::to_string(cell.input) + " and state " + std::to_string(H) + ", got " +
                      std::to_string(size(x)) + " and " + std::to_string(size(h)));
  const ParamStore& s = *store_;
  const auto xv = value(x);
  const auto hv = value(h);

  std::vector<double> z = s[cell.bz].value, r = s[cell.br].value, n = s[cell.bn].value;
  matvec_add(s[cell.wz], xv, z);
  matvec_add(s[cell.uz], hv, z);
  matvec_add(s[cell.wr], xv, r);
  matvec_add(s[cell.ur], hv, r);
  for (std::size_t i = 0; i < H; ++i) {
    z[i] = sigmoid_of(z[i]);
    r[i] = sigmoid_of(r[i]);
  }
  std::vector<double> rh(H);
  for (std::size_t i = 0; i < H; ++i) rh[i] = r[i] * hv[i];
  matvec_add(s[cell.wn], xv, n);
  matvec_add(s[cell.un], rh, n);
  for (double& v : n) v = std::tanh(v);
  std::vector<double> out(H);
  for (std::size_t i = 0; i < H; ++i) out[i] = (1.0 - z[i]) * n[i] + z[i] * hv[i];

  return push("gru", std::move(out),
              [c = cell, x, h, z = std::move(z), r = std::move(r), n = std::move(n), rh = std::move(rh)](Tape& t, std::span<const double> g) {
                const ParamStore& s = *t.store_;
                const std::size_t H = c.hidden;
                const auto xv = t.value(x);
                const auto hv = t.value(h);
                std::vector<double> dz(H), dn(H), dh(H), dr(H), drh(H, 0.0), dx(c.input, 0.0);
                for (std::size_t i = 0; i < H; ++i) {
                  dz[i] = g[i] * (hv[i] - n[i]) * z[i] * (1.0 - z[i]);
                  dn[i] = g[i] * (1.0 - z[i]) * (1.0 - n[i] * n[i]);
                  dh[i] = g[i] * z[i];
                }
                outer_add(t.grads_of(c.wn), c.input, dn, xv);
                outer_add(t.grads_of(c.un), H, dn, rh);
                add_into(t.grads_of(c.bn), dn);
                matvec_t_add(s[c.wn], dn, dx);
                matvec_t_add(s[c.un], dn, drh);
                for (std::size_t i = 0; i < H; ++i) {
                  dr[i] = drh[i] * hv[i] * r[i] * (1.0 - r[i]);
                  dh[i] += drh[i] * r[i];
                }
                outer_add(t.grads_of(c.wz), c.input, dz, xv);
                outer_add(t.grads_of(c.uz), H, dz, hv);
                add_into(t.grads_of(c.bz), dz);
                matvec_t_add(s[c.wz], dz, dx);
                matvec_t_add(s[c.uz], dz, dh);
                outer_add(t.grads_of(c.wr), c.input, dr, xv);
                outer_add(t.grads_of(c.ur), H, dr, hv);
                add_into(t.grads_of(c.br), dr);
                matvec_t_add(s[c.wr], dr, dx);
                matvec_t_add(s[c.ur], dr, dh);
                t.accumulate(x, dx);
                t.accumulate(h, dh);
              });
}

void Tape::backward(Var loss, GradBuffer& grads) {
  if (size(loss) != 1) throw ConfigError("backward: loss must be a scalar");
  if (grads.size() != store_->size()) throw ConfigError("backward: gradient buffer does not match the parameter store");
  grads_ = &grads;
  for (auto& n : nodes_) {
    n.touched = false;
    n.grad.clear();
  }
  const double one = 1.0;
  accumulate(loss, std::span<const double>(&one, 1));
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.touched) continue;
    if (!all_finite(n.grad)) throw NumericError(std::string("non-finite gradient in backward op '") + n.op + "'");
    if (n.backward) n.backward(*this, n.grad);
  }
  grads_ = nullptr;
}

}  // namespace netxfer::ndiff
