#include <cmath>
#include <cstring>
#include <sstream>

#include "doctest.h"
#include "fd_oracle.hpp"
#include "model_fixtures.hpp"
#include "netxfer/dataio/normalizer.hpp"
#include "netxfer/errors.hpp"
#include "netxfer/rnmodel/checkpoint.hpp"
#include "netxfer/rnmodel/train.hpp"

using namespace netxfer;
using namespace netxfer::rnmodel;
using ndiff::Tape;
using ndiff::Var;
using testing::hand_built;
using testing::tiny_config;

namespace {

std::vector<double> values(const Tape& t, Var v) {
  const auto s = t.value(v);
  return {s.begin(), s.end()};
}

void zero_params(Model& m) {
  for (auto& p : m.params()) std::fill(p.value.begin(), p.value.end(), 0.0);
}

// Queue embeddings after message passing for window 0.
std::vector<std::vector<double>> queue_states(const Model& m, const PreparedScenario& s) {
  Tape tape(m.params());
  const auto fw = m.forward(tape, s);
  std::vector<std::vector<double>> out;
  for (Var q : fw.windows[0].queues) out.push_back(values(tape, q));
  return out;
}

std::vector<double> flow_state(const Model& m, const PreparedScenario& s, std::size_t active_index) {
  Tape tape(m.params());
  const auto fw = m.forward(tape, s);
  return values(tape, fw.windows[0].flows[active_index]);
}

PreparedScenario drop_flow(PreparedScenario s, std::size_t flow) {
  for (auto& w : s.windows) {
    w.active.erase(w.active.begin() + static_cast<long>(flow));
    w.flow_features.erase(w.flow_features.begin() + static_cast<long>(flow));
    w.targets.erase(w.targets.begin() + static_cast<long>(flow));
    for (auto& a : w.active)
      if (a > flow) --a;
  }
  s.graph.flows.erase(s.graph.flows.begin() + static_cast<long>(flow));
  return s;
}

}  // namespace

TEST_CASE("config validation") {
  ModelConfig c = tiny_config();
  c.encoder_widths = {5, 3};
  CHECK_THROWS_AS(Model{c}, ConfigError);
  c = tiny_config();
  c.mpa_iterations = 0;
  CHECK_THROWS_AS(Model{c}, ConfigError);
  c = tiny_config();
  CHECK(model_config_from_json(model_config_to_json(c)) == c);
  CHECK_THROWS_AS(model_config_from_json({{"embedding_dim", 4}, {"bogus", 1}}), ConfigError);

  Model m(tiny_config());
  auto s = hand_built(2, {{0, 1}}, 1);
  s.windows[0].queue_features[0].push_back(0.0);
  Tape tape(m.params());
  CHECK_THROWS_AS(m.forward(tape, s), ConfigError);
  s = hand_built(2, {{}}, 1);
  CHECK_THROWS_AS(m.forward(tape, s), ConfigError);
}

TEST_CASE("encode") {
  Model m(tiny_config());
  m.init(1);
  const auto s = hand_built(2, {{0, 1}}, 2);

  SUBCASE("first window bypasses the inter-window cell") {
    const auto before = m.predict(s)[0];
    for (auto i : m.params().block_indices(ndiff::Block::Mpa))
      if (m.params()[i].name.starts_with("mpa.window")) std::fill(m.params()[i].value.begin(), m.params()[i].value.end(), 3.0);
    CHECK(m.predict(s)[0] == before);
  }
  SUBCASE("all-zero features and parameters give zero embeddings") {
    zero_params(m);
    auto z = s;
    for (auto& w : z.windows) {
      for (auto& x : w.flow_features) std::fill(x.begin(), x.end(), 0.0);
      for (auto& x : w.link_features) std::fill(x.begin(), x.end(), 0.0);
      for (auto& x : w.queue_features) std::fill(x.begin(), x.end(), 0.0);
    }
    Tape tape(m.params());
    const auto e = m.encode(tape, z.windows[0], nullptr);
    for (const auto* group : {&e.flows, &e.queues, &e.links})
      for (Var v : *group)
        for (double x : tape.value(v)) CHECK(x == 0.0);
  }
  SUBCASE("queue state depends on the previous window") {
    Tape tape(m.params());
    const Var a[] = {tape.input({0.1, 0.2, 0.3, 0.4}), tape.input({0.0, 0.0, 0.0, 0.0})};
    const Var b[] = {tape.input({-0.5, 0.9, 0.3, -0.2}), tape.input({0.0, 0.0, 0.0, 0.0})};
    const auto ea = m.encode(tape, s.windows[1], a);
    const auto eb = m.encode(tape, s.windows[1], b);
    CHECK(values(tape, ea.queues[0]) != values(tape, eb.queues[0]));
    CHECK(values(tape, ea.queues[1]) == values(tape, eb.queues[1]));
  }
}

TEST_CASE("message passing") {
  Model m(tiny_config(4, 3));
  m.init(2);

  SUBCASE("a flow elsewhere in the graph contributes nothing") {
    const auto both = hand_built(3, {{0, 1}, {2}}, 1);
    const auto alone = drop_flow(both, 1);
    const auto a = queue_states(m, both), b = queue_states(m, alone);
    CHECK(a[0] == b[0]);
    CHECK(a[1] == b[1]);
    CHECK(a[2] != b[2]);
  }
  SUBCASE("flow order does not change queue aggregates") {
    const auto s = hand_built(3, {{0, 1}, {1, 2}, {1}}, 1);
    auto p = s;
    std::swap(p.graph.flows[0], p.graph.flows[2]);
    auto& w = p.windows[0];
    std::swap(w.flow_features[0], w.flow_features[2]);
    std::swap(w.targets[0], w.targets[2]);
    const auto a = queue_states(m, s), b = queue_states(m, p);
    for (std::size_t q = 0; q < a.size(); ++q)
      for (std::size_t k = 0; k < a[q].size(); ++k) CHECK(a[q][k] == doctest::Approx(b[q][k]).epsilon(1e-12));
  }
  SUBCASE("removing a flow on a shared queue changes the other flow") {
    const auto both = hand_built(2, {{0, 1}, {1}}, 1);
    CHECK(flow_state(m, both, 0) != flow_state(m, drop_flow(both, 1), 0));
  }
}

TEST_CASE("readout") {
  Model m(tiny_config());
  const auto s = hand_built(2, {{0, 1}, {1}}, 2);

  SUBCASE("predictions are positive for any parameters") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      m.init(seed);
      for (auto& p : m.params())
        for (double& x : p.value) x *= 2.0;
      for (const auto& w : m.predict(s))
        for (double p : w) CHECK(p > 0.0);
    }
  }
  SUBCASE("zero readout gives ln 2 times the target scale") {
    m.init(3);
    dataio::Normalizer n;
    n.target_scale = 0.004;
    m.set_normalizer(n);
    for (auto i : m.params().block_indices(ndiff::Block::Readout))
      std::fill(m.params()[i].value.begin(), m.params()[i].value.end(), 0.0);
    for (const auto& w : m.predict(s))
      for (double p : w) CHECK(p == doctest::Approx(std::log(2.0) * 0.004).epsilon(1e-15));
  }
  SUBCASE("inactive flows produce no prediction") {
    auto t = s;
    t.windows[1] = {};
    t.windows[1].link_features = s.windows[0].link_features;
    t.windows[1].queue_features = s.windows[0].queue_features;
    m.init(1);
    const auto p = m.predict(t);
    CHECK(p[0].size() == 2);
    CHECK(p[1].empty());
  }
}

TEST_CASE("end-to-end gradient check, 2 flows x 2 windows") {
  Model m(tiny_config(4, 2));
  m.init(11);
  // Nonzero biases keep ReLUs off their kinks.
  netsim::CounterRng rng(5, 0);
  for (auto& p : m.params())
    if (p.shape.size() == 1)
      for (double& x : p.value) x = rng.uniform(-0.4, 0.4);
  dataio::Normalizer n;
  n.target_scale = 0.003;
  m.set_normalizer(n);
  auto s = hand_built(3, {{0, 1}, {1, 2}}, 2);
  s.windows[1].flow_features[0][0] += 0.5;
  s.windows[1].queue_features[2][1] -= 0.3;

  auto loss = [&](ndiff::GradBuffer* grads) {
    Tape tape(m.params());
    const auto fw = m.forward(tape, s);
    // Smooth loss: MAPE has kinks, the squared relative error does not.
    std::vector<Var> terms;
    for (std::size_t w = 0; w < 2; ++w) {
      const Var p = tape.scale(fw.windows[w].predictions, 1.0 / 0.003);
      terms.push_back(tape.dot(p, p));
      for (Var q : fw.windows[w].queues) terms.push_back(tape.sum_elements(q));
    }
    const Var total = tape.sum(terms);
    if (grads) tape.backward(total, *grads);
    return tape.scalar(total);
  };
  auto grads = m.params().make_grad_buffer();
  loss(&grads);
  const auto bad = testing::finite_difference_check(m.params(), grads, [&] { return loss(nullptr); });
  for (const auto& b : bad) INFO(b.param << "[" << b.element << "] " << b.analytic << " vs " << b.numeric);
  CHECK(bad.empty());
  for (std::size_t i = 0; i < grads.size(); ++i) {
    double norm = 0.0;
    for (double g : grads[i]) norm += g * g;
    INFO(m.params()[i].name);
    CHECK(norm > 0.0);
  }
}

TEST_CASE("MAPE loss node") {
  ndiff::ParamStore store;
  Tape tape(store);
  const Var p = tape.input({0.011, 0.009, 0.010});
  const double t[] = {0.010, 0.010, 0.010};
  const Var l = relative_error_sum(tape, p, t, 0.5);
  CHECK(tape.scalar(l) == doctest::Approx(0.5 * 0.2).epsilon(1e-12));
  auto g = store.make_grad_buffer();
  tape.backward(l, g);
  CHECK(tape.grad(p)[0] == doctest::Approx(50.0));
  CHECK(tape.grad(p)[1] == doctest::Approx(-50.0));
  CHECK(tape.grad(p)[2] == 0.0);
  const double bad[] = {0.01, 0.0, 0.01};
  CHECK_THROWS_AS(relative_error_sum(tape, p, bad, 1.0), DataError);
}

TEST_CASE("stationarity without window memory") {
  Model m(tiny_config(4, 3));
  m.init(4);
  const auto s = hand_built(3, {{0, 1}, {1, 2}}, 3);
  const auto p = m.predict(s, {.window_memory = false});
  CHECK(p[0] == p[1]);
  CHECK(p[1] == p[2]);
  const auto q = m.predict(s);
  CHECK(q[0] == p[0]);
  CHECK(q[1] != p[1]);
}

TEST_CASE("relabeling entities gives identical predictions") {
  Model m(tiny_config(4, 3));
  m.init(6);
  const auto s = hand_built(4, {{0, 1, 2}, {3, 1}, {2}}, 2);
  // queue/link q -> perm[q]; flows reversed.
  const std::size_t perm[] = {2, 0, 3, 1};
  PreparedScenario r = s;
  for (std::size_t q = 0; q < 4; ++q) {
    r.graph.links[perm[q]] = s.graph.links[q];
    r.graph.links[perm[q]].id = static_cast<std::uint32_t>(10 + perm[q]);
    r.graph.queues[perm[q]] = {static_cast<std::uint32_t>(20 + perm[q]), perm[q], 1000.0};
  }
  const std::size_t flows = s.graph.flows.size();
  for (std::size_t f = 0; f < flows; ++f) {
    auto& g = r.graph.flows[flows - 1 - f];
    g = s.graph.flows[f];
    g.id = static_cast<std::uint32_t>(30 + f);
    for (auto& q : g.path) q = perm[q];
  }
  for (std::size_t w = 0; w < s.windows.size(); ++w) {
    for (std::size_t q = 0; q < 4; ++q) {
      r.windows[w].link_features[perm[q]] = s.windows[w].link_features[q];
      r.windows[w].queue_features[perm[q]] = s.windows[w].queue_features[q];
    }
    for (std::size_t f = 0; f < flows; ++f) {
      r.windows[w].flow_features[flows - 1 - f] = s.windows[w].flow_features[f];
      r.windows[w].targets[flows - 1 - f] = s.windows[w].targets[f];
    }
  }
  const auto a = m.predict(s), b = m.predict(r);
  for (std::size_t w = 0; w < a.size(); ++w)
    for (std::size_t f = 0; f < flows; ++f) CHECK(a[w][f] == doctest::Approx(b[w][flows - 1 - f]).epsilon(1e-12));
}

TEST_CASE("training") {
  const auto data = testing::windowed(testing::tiny_template(), 8, 21);
  const auto norm = dataio::fit_normalizer(std::span(data).first(6));
  const auto prepared = prepare_all(data, norm);
  const std::span<const PreparedScenario> train_set(prepared.data(), 6), val_set(prepared.data() + 6, 2);
  TrainConfig tc{.lr = 3e-3, .max_epochs = 12, .patience = 3, .batch_size = 2, .seed = 9};

  auto fresh = [&] {
    Model m(tiny_config(8, 2), norm);
    m.init(1);
    return m;
  };

  SUBCASE("early stopping and best checkpoint") {
    Model m = fresh();
    const auto h = train(m, train_set, val_set, tc);
    CHECK(h.epochs.front().epoch == 0);
    CHECK(h.epochs.back().epoch <= h.best_epoch + tc.patience);
    CHECK(h.epochs.back().epoch <= tc.max_epochs);
    double best = h.epochs.front().val_loss;
    for (const auto& e : h.epochs) best = std::min(best, e.val_loss);
    CHECK(h.best_val_loss == best);
    CHECK(evaluate_loss(m, val_set) == h.best_val_loss);
  }
  SUBCASE("fixed seed gives identical history") {
    Model a = fresh(), b = fresh();
    const auto ha = train(a, train_set, val_set, tc);
    const auto hb = train(b, train_set, val_set, tc);
    std::ostringstream ca, cb;
    write_history_csv(ca, ha);
    write_history_csv(cb, hb);
    CHECK(ca.str() == cb.str());
    CHECK(ca.str().starts_with("epoch,train_loss,val_loss\n"));
    CHECK(model_to_json(a).dump() == model_to_json(b).dump());
  }
  SUBCASE("errors") {
    Model m = fresh();
    CHECK_THROWS_AS(train(m, {}, val_set, tc), DataError);
    CHECK_THROWS_AS(train(m, train_set, {}, tc), DataError);
    for (auto b : ndiff::kBlocks) m.params().set_block_trainable(b, false);
    CHECK_THROWS_WITH_AS(train(m, train_set, val_set, tc), "no trainable parameters", ConfigError);
  }
  SUBCASE("checkpoint round trip is bit-exact") {
    Model m = fresh();
    const auto j = nlohmann::json::parse(model_to_json(m).dump());
    CHECK(j.at("schema-version") == kModelSchema);
    const Model back = model_from_json(j);
    CHECK(back.config() == m.config());
    CHECK(back.normalizer() == m.normalizer());
    CHECK(back.predict(prepared[0]) == m.predict(prepared[0]));
    auto broken = j;
    broken["hyperparameters"]["embedding_dim"] = 6;
    broken["hyperparameters"]["encoder_widths"] = {5, 6};
    CHECK_THROWS_AS(model_from_json(broken), ConfigError);
  }
}

TEST_CASE("overfits five scenarios") {
  const auto data = testing::windowed(testing::tiny_template(), 5, 33);
  const auto norm = dataio::fit_normalizer(data);
  const auto prepared = prepare_all(data, norm);
  ModelConfig c;
  c.embedding_dim = 16;
  c.mpa_iterations = 3;
  c.encoder_widths = {16, 16};
  c.readout_widths = {16, 16};
  Model m(c, norm);
  m.init(2);
  const auto h = train(m, prepared, prepared, {.lr = 3e-3, .max_epochs = 500, .patience = 500, .batch_size = 1, .seed = 4});
  MESSAGE("overfit MAPE " << 100.0 * h.best_val_loss << "% after " << h.epochs.size() - 1 << " epochs");
  CHECK(h.best_val_loss < 0.02);
}
