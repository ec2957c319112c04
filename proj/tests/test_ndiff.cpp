#include <cmath>
#include <cstring>
#include <functional>
#include <limits>

#include "doctest.h"
#include "fd_oracle.hpp"
#include "netxfer/errors.hpp"
#include "netxfer/ndiff/checkpoint.hpp"
#include "netxfer/ndiff/layers.hpp"
#include "netxfer/ndiff/optimizer.hpp"
#include "netxfer/ndiff/tape.hpp"
#include "netxfer/netsim/rng.hpp"

using namespace netxfer;
using namespace netxfer::ndiff;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  netsim::CounterRng rng(seed, 0);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

void randomize(ParamStore& store, std::uint64_t seed, double scale = 0.7) {
  for (std::size_t i = 0; i < store.size(); ++i) store[i].value = random_vector(store[i].size(), seed * 101 + i, scale);
}

// Builds the graph from the store, returns the scalar loss and (optionally) its gradient.
using Graph = std::function<Var(Tape&)>;

double evaluate(const ParamStore& store, const Graph& graph, GradBuffer* grads = nullptr) {
  Tape tape(store);
  const Var loss = graph(tape);
  if (grads) tape.backward(loss, *grads);
  return tape.scalar(loss);
}

void check_gradients(ParamStore& store, const Graph& graph) {
  GradBuffer grads = store.make_grad_buffer();
  evaluate(store, graph, &grads);
  const auto bad = testing::finite_difference_check(store, grads, [&] { return evaluate(store, graph); });
  for (const auto& m : bad) INFO(m.param << "[" << m.element << "] analytic " << m.analytic << " numeric " << m.numeric);
  CHECK(bad.empty());
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("linear loss gradient") {
  ParamStore store;
  const auto w = store.add("w", {2}, Block::Encoding);
  store[w].value = {1.0, 2.0};
  Tape tape(store);
  const Var loss = tape.dot(tape.param(w), tape.input({3.0, 4.0}));
  CHECK(tape.scalar(loss) == 11.0);
  GradBuffer grads = store.make_grad_buffer();
  tape.backward(loss, grads);
  CHECK(grads[w] == std::vector<double>{3.0, 4.0});
}

TEST_CASE("primitive gradients match central differences") {
  ParamStore store;
  const Dense d = make_dense(store, "d", 3, 4, Block::Encoding);
  const auto v = store.add("v", {4}, Block::Mpa);
  const auto u = store.add("u", {4}, Block::Readout);
  randomize(store, 1);
  const auto x = random_vector(3, 99);

  SUBCASE("affine") {
    check_gradients(store, [&](Tape& t) { return t.dot(t.affine(d.weight, d.bias, t.input(x)), t.param(v)); });
  }
  SUBCASE("sigmoid") { check_gradients(store, [&](Tape& t) { return t.dot(t.sigmoid(t.param(u)), t.param(v)); }); }
  SUBCASE("tanh") { check_gradients(store, [&](Tape& t) { return t.dot(t.tanh(t.param(u)), t.param(v)); }); }
  SUBCASE("softplus") {
    store[u].value = {-30.0, -0.4, 0.3, 25.0};
    check_gradients(store, [&](Tape& t) { return t.dot(t.softplus(t.param(u)), t.param(v)); });
  }
  SUBCASE("relu away from the kink") {
    store[u].value = {-0.5, 0.2, 0.9, -0.1};
    check_gradients(store, [&](Tape& t) { return t.dot(t.relu(t.param(u)), t.param(v)); });
  }
  SUBCASE("mul, add, scale") {
    check_gradients(store, [&](Tape& t) {
      const Var a = t.param(u), b = t.param(v);
      return t.sum_elements(t.scale(t.add(t.mul(a, b), a), -1.7));
    });
  }
  SUBCASE("sum and concat") {
    check_gradients(store, [&](Tape& t) {
      const Var a = t.param(u), b = t.param(v);
      const Var parts[] = {a, b, t.mul(a, a)};
      const Var s = t.sum(parts);
      return t.dot(t.concat(s, b), t.concat(b, t.tanh(s)));
    });
  }
}

TEST_CASE("GRU cell") {
  ParamStore store;
  const GruCell cell = make_gru(store, "gru", 3, 4, Block::Mpa);
  const auto c = store.add("c", {4}, Block::Readout);
  const auto h0 = store.add("h0", {4}, Block::Encoding);
  const auto x0 = store.add("x0", {3}, Block::Encoding);

  SUBCASE("zero weights halve the state") {
    Tape tape(store);
    const Var h = tape.input({0.4, -1.0, 2.5, 0.0});
    const Var out = cell.forward(tape, tape.input({1.0, 2.0, 3.0}), h);
    const auto v = tape.value(out);
    CHECK(v[0] == 0.2);
    CHECK(v[1] == -0.5);
    CHECK(v[2] == 1.25);
    CHECK(v[3] == 0.0);
  }
  SUBCASE("gate outputs stay in range under extreme weights") {
    randomize(store, 3, 40.0);
    Tape tape(store);
    const Var out = cell.forward(tape, tape.param(x0), tape.param(h0));
    for (double v : tape.value(out)) CHECK(std::isfinite(v));
  }
  SUBCASE("gradients through two chained steps") {
    randomize(store, 2);
    check_gradients(store, [&](Tape& t) {
      const Var x = t.param(x0);
      Var h = cell.forward(t, x, t.param(h0));
      h = cell.forward(t, x, h);
      return t.dot(h, t.param(c));
    });
  }
}

TEST_CASE("composed MLP + GRU graph") {
  ParamStore store;
  const Mlp enc = make_mlp(store, "enc", 2, {5, 4}, Block::Encoding, true);
  const GruCell cell = make_gru(store, "gru", 4, 4, Block::Mpa);
  const Mlp head = make_mlp(store, "head", 4, {3, 1}, Block::Readout, false);
  glorot_init(store, 5);
  // Nonzero biases so ReLUs sit away from their kinks.
  for (auto& p : store)
    if (p.shape.size() == 1) p.value = random_vector(p.size(), p.size() + 17, 0.3);
  check_gradients(store, [&](Tape& t) {
    const Var a = enc.forward(t, t.input({0.3, -0.8}));
    const Var b = enc.forward(t, t.input({1.1, 0.4}));
    Var h = cell.forward(t, a, b);
    h = cell.forward(t, b, h);
    return t.sum_elements(t.softplus(head.forward(t, h)));
  });
}

TEST_CASE("frozen parameters still pass gradient through") {
  ParamStore store;
  const auto a = store.add("a", {2}, Block::Encoding);
  const auto b = store.add("b", {2}, Block::Readout);
  store[a].value = {0.5, -0.5};
  store[b].value = {2.0, 3.0};
  store[a].trainable = false;
  Tape tape(store);
  const Var loss = tape.dot(tape.tanh(tape.param(a)), tape.param(b));
  GradBuffer grads = store.make_grad_buffer();
  tape.backward(loss, grads);
  CHECK(grads[a][0] != 0.0);
  CHECK(grads[b][0] == doctest::Approx(std::tanh(0.5)));
}

TEST_CASE("non-finite values name the op") {
  ParamStore store;
  Tape tape(store);
  const Var x = tape.input({1.0, 2.0});
  CHECK_THROWS_WITH_AS(tape.scale(x, std::numeric_limits<double>::infinity()), doctest::Contains("scale"), NumericError);
  CHECK_THROWS_AS(tape.input({std::nan("")}), NumericError);

  const Var big = tape.input({1e200});
  CHECK_THROWS_WITH_AS(tape.mul(big, big), doctest::Contains("mul"), NumericError);
}

TEST_CASE("Adam") {
  ParamStore store;
  const auto w = store.add("w", {1}, Block::Readout);

  SUBCASE("descends") {
    store[w].grad = {1.0};
    Adam adam(store, AdamConfig{.lr = 0.1});
    adam.step(store);
    CHECK(store[w].value[0] < 0.0);
    CHECK(store[w].value[0] == doctest::Approx(-0.1).epsilon(1e-6));
    CHECK(store[w].grad[0] == 0.0);
  }
  SUBCASE("zero learning rate is the identity") {
    store[w].value = {0.25};
    store[w].grad = {3.0};
    Adam adam(store, AdamConfig{.lr = 0.0});
    adam.step(store);
    CHECK(store[w].value[0] == 0.25);
  }
  SUBCASE("frozen parameters are untouched bitwise") {
    const auto f = store.add("f", {3}, Block::Encoding);
    store[f].value = {0.1, 0.2, 0.3};
    const auto before = store[f].value;
    store[f].trainable = false;
    store[f].grad = {5.0, 5.0, 5.0};
    store[w].grad = {1.0};
    Adam adam(store, {});
    adam.step(store);
    CHECK(bitwise_equal(store[f].value, before));
  }
  SUBCASE("deterministic") {
    ParamStore other;
    other.add("w", {1}, Block::Readout);
    Adam a(store, {}), b(other, {});
    for (int i = 0; i < 5; ++i) {
      store[w].grad = {0.3 * i - 0.5};
      other[0].grad = {0.3 * i - 0.5};
      a.step(store);
      b.step(other);
    }
    CHECK(bitwise_equal(store[w].value, other[0].value));
  }
  SUBCASE("nothing trainable") {
    store[w].trainable = false;
    Adam adam(store, {});
    CHECK_THROWS_WITH_AS(adam.step(store), "no trainable parameters", ConfigError);
  }
}

TEST_CASE("Glorot initialization") {
  ParamStore store;
  make_dense(store, "a", 6, 4, Block::Encoding);
  make_dense(store, "b", 4, 2, Block::Readout);
  glorot_init(store, 11);
  const double limit = std::sqrt(6.0 / 10.0);
  for (double v : store[0].value) CHECK(std::abs(v) <= limit);
  for (double v : store[1].value) CHECK(v == 0.0);

  ParamStore again;
  make_dense(again, "a", 6, 4, Block::Encoding);
  make_dense(again, "b", 4, 2, Block::Readout);
  glorot_init(again, 11, Block::Readout);
  CHECK(bitwise_equal(again[2].value, store[2].value));
  CHECK(again[0].value != store[0].value);
}

TEST_CASE("parameter checkpoint round trip is bit-exact") {
  ParamStore store;
  make_gru(store, "g", 3, 2, Block::Mpa);
  randomize(store, 8, 1.0 / 3.0);
  const auto j = nlohmann::json::parse(params_to_json(store).dump());
  ParamStore back;
  make_gru(back, "g", 3, 2, Block::Mpa);
  load_params_json(back, j);
  for (std::size_t i = 0; i < store.size(); ++i) CHECK(bitwise_equal(back[i].value, store[i].value));

  ParamStore wrong;
  make_gru(wrong, "g", 2, 2, Block::Mpa);
  CHECK_THROWS_AS(load_params_json(wrong, j), ConfigError);
  CHECK_THROWS_AS(store.add("g.wz", {1}, Block::Mpa), ConfigError);
}
