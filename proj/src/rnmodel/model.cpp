#include "netxfer/rnmodel/model.hpp"

#include <cmath>
#include <string>

#include "netxfer/errors.hpp"

namespace netxfer::rnmodel {

using ndiff::Block;
using ndiff::Tape;
using ndiff::Var;

void ModelConfig::validate() const {
  if (embedding_dim < 1) throw ConfigError("model: embedding_dim must be >= 1");
  if (mpa_iterations < 1) throw ConfigError("model: mpa_iterations must be >= 1");
  if (!(window_length > 0.0)) throw ConfigError("model: window_length must be > 0");
  if (encoder_widths.empty() || encoder_widths.back() != embedding_dim)
    throw ConfigError("model: last encoder width must equal embedding_dim (" + std::to_string(embedding_dim) + ")");
  for (auto w : encoder_widths)
    if (w == 0) throw ConfigError("model: zero encoder width");
  for (auto w : readout_widths)
    if (w == 0) throw ConfigError("model: zero readout width");
}

nlohmann::json model_config_to_json(const ModelConfig& c) {
  return {{"embedding_dim", c.embedding_dim},
          {"mpa_iterations", c.mpa_iterations},
          {"window_length", c.window_length},
          {"encoder_widths", c.encoder_widths},
          {"readout_widths", c.readout_widths}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  static const char* keys[] = {"embedding_dim", "mpa_iterations", "window_length", "encoder_widths", "readout_widths"};
  if (!j.is_object()) throw ConfigError("model config: expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw ConfigError("model config: unknown key '" + k + "'");
  }
  ModelConfig c;
  try {
    if (j.contains("embedding_dim")) c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    if (j.contains("mpa_iterations")) c.mpa_iterations = j.at("mpa_iterations").get<std::size_t>();
    if (j.contains("window_length")) c.window_length = j.at("window_length").get<double>();
    if (j.contains("encoder_widths")) c.encoder_widths = j.at("encoder_widths").get<std::vector<std::size_t>>();
    else c.encoder_widths = {c.embedding_dim, c.embedding_dim};
    if (j.contains("readout_widths")) c.readout_widths = j.at("readout_widths").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

Model::Model(ModelConfig config, dataio::Normalizer normalizer)
    : config_(std::move(config)), normalizer_(std::move(normalizer)) {
  config_.validate();
  const std::size_t d = config_.embedding_dim;
  flow_encoder_ = ndiff::make_mlp(params_, "encoding.flow", dataio::kFlowFeatureCount, config_.encoder_widths, Block::Encoding, true);
  link_encoder_ = ndiff::make_mlp(params_, "encoding.link", dataio::kLinkFeatureCount, config_.encoder_widths, Block::Encoding, true);
  queue_encoder_ =
      ndiff::make_mlp(params_, "encoding.queue", dataio::kQueueFeatureCount, config_.encoder_widths, Block::Encoding, true);
  flow_gru_ = ndiff::make_gru(params_, "mpa.flow", 2 * d, d, Block::Mpa);
  queue_gru_ = ndiff::make_gru(params_, "mpa.queue", d, d, Block::Mpa);
  link_gru_ = ndiff::make_gru(params_, "mpa.link", d, d, Block::Mpa);
  window_gru_ = ndiff::make_gru(params_, "mpa.window", d, d, Block::Mpa);
  auto widths = config_.readout_widths;
  widths.push_back(1);
  readout_ = ndiff::make_mlp(params_, "readout", d, widths, Block::Readout, false);
}

namespace {

void check_shapes(const PreparedScenario& s) {
  for (const auto& f : s.graph.flows) {
    if (f.path.empty()) throw ConfigError("model: flow " + std::to_string(f.id) + " has an empty path");
    for (auto q : f.path)
      if (q >= s.graph.queues.size()) throw ConfigError("model: flow path references a missing queue");
  }
  for (const auto& q : s.graph.queues)
    if (q.link >= s.graph.links.size()) throw ConfigError("model: queue references a missing link");
  for (const auto& w : s.windows) {
    if (w.link_features.size() != s.graph.links.size() || w.queue_features.size() != s.graph.queues.size())
      throw ConfigError("model: window features do not match the graph");
    if (w.flow_features.size() != w.active.size() || w.targets.size() != w.active.size())
      throw ConfigError("model: active flow list misaligned");
    for (const auto& x : w.flow_features)
      if (x.size() != dataio::kFlowFeatureCount) throw ConfigError("model: flow feature width mismatch");
    for (const auto& x : w.link_features)
      if (x.size() != dataio::kLinkFeatureCount) throw ConfigError("model: link feature width mismatch");
    for (const auto& x : w.queue_features)
      if (x.size() != dataio::kQueueFeatureCount) throw ConfigError("model: queue feature width mismatch");
  }
}

Var stack(Tape& tape, std::span<const Var> scalars) {
  std::vector<double> v;
  v.reserve(scalars.size());
  for (Var s : scalars) v.push_back(tape.scalar(s));
  return tape.custom("stack", std::move(v), [inputs = std::vector<Var>(scalars.begin(), scalars.end())](
                                                  Tape& t, std::span<const double> g) {
    for (std::size_t i = 0; i < inputs.size(); ++i) t.accumulate(inputs[i], g.subspan(i, 1));
  });
}

}  // namespace

Model::Embeddings Model::encode(Tape& tape, const PreparedWindow& window, const Var* previous_queues) const {
  Embeddings e;
  e.flows.reserve(window.active.size());
  for (const auto& x : window.flow_features) e.flows.push_back(flow_encoder_.forward(tape, tape.input(x)));
  for (const auto& x : window.link_features) e.links.push_back(link_encoder_.forward(tape, tape.input(x)));
  for (std::size_t q = 0; q < window.queue_features.size(); ++q) {
    Var h = queue_encoder_.forward(tape, tape.input(window.queue_features[q]));
    if (previous_queues) h = window_gru_.forward(tape, h, previous_queues[q]);
    e.queues.push_back(h);
  }
  return e;
}

void Model::message_pass(Tape& tape, const PreparedScenario& scenario, const PreparedWindow& window,
                         Embeddings& state) const {
  const auto& graph = scenario.graph;
  const Var zero = tape.input(std::vector<double>(config_.embedding_dim, 0.0));
  std::vector<std::vector<Var>> messages(graph.queues.size());
  std::vector<std::vector<Var>> link_inputs(graph.links.size());
  for (std::size_t it = 0; it < config_.mpa_iterations; ++it) {
    for (auto& m : messages) m.clear();
    for (std::size_t i = 0; i < window.active.size(); ++i) {
      Var h = state.flows[i];
      for (std::size_t q : graph.flows[window.active[i]].path) {
        const Var x = tape.concat(state.queues[q], state.links[graph.queues[q].link]);
        h = flow_gru_.forward(tape, x, h);
        messages[q].push_back(h);
      }
      state.flows[i] = h;
    }
    for (std::size_t q = 0; q < graph.queues.size(); ++q) {
      const Var in = messages[q].empty() ? zero : messages[q].size() == 1 ? messages[q][0] : tape.sum(messages[q]);
      state.queues[q] = queue_gru_.forward(tape, in, state.queues[q]);
    }
    for (auto& l : link_inputs) l.clear();
    for (std::size_t q = 0; q < graph.queues.size(); ++q) link_inputs[graph.queues[q].link].push_back(state.queues[q]);
    for (std::size_t l = 0; l < graph.links.size(); ++l) {
      const auto& ins = link_inputs[l];
      const Var in = ins.empty() ? zero : ins.size() == 1 ? ins[0] : tape.sum(ins);
      state.links[l] = link_gru_.forward(tape, in, state.links[l]);
    }
  }
}

Var Model::readout(Tape& tape, std::span<const Var> flows) const {
  std::vector<Var> outs;
  outs.reserve(flows.size());
  for (Var h : flows) outs.push_back(readout_.forward(tape, h));
  return tape.scale(tape.softplus(stack(tape, outs)), normalizer_.target_scale);
}

ScenarioForward Model::forward(Tape& tape, const PreparedScenario& scenario, const ForwardOptions& options) const {
  check_shapes(scenario);
  ScenarioForward out;
  out.windows.reserve(scenario.windows.size());
  std::vector<Var> previous;
  for (const auto& window : scenario.windows) {
    const bool carry = options.window_memory && !previous.empty();
    Embeddings state = encode(tape, window, carry ? previous.data() : nullptr);
    message_pass(tape, scenario, window, state);
    WindowForward wf;
    if (!state.flows.empty()) wf.predictions = readout(tape, state.flows);
    previous = state.queues;
    wf.flows = std::move(state.flows);
    wf.queues = std::move(state.queues);
    wf.links = std::move(state.links);
    out.windows.push_back(std::move(wf));
  }
  return out;
}

std::vector<std::vector<double>> Model::predict(const PreparedScenario& scenario, const ForwardOptions& options) const {
  Tape tape(params_);
  const ScenarioForward fw = forward(tape, scenario, options);
  std::vector<std::vector<double>> out;
  out.reserve(fw.windows.size());
  for (const auto& w : fw.windows) {
    if (w.predictions.valid()) {
      const auto v = tape.value(w.predictions);
      out.emplace_back(v.begin(), v.end());
    } else {
      out.emplace_back();
    }
  }
  return out;
}

Var relative_error_sum(Tape& tape, Var predictions, std::span<const double> targets, double weight) {
  const auto p = tape.value(predictions);
  if (p.size() != targets.size()) throw ConfigError("loss: prediction/target count mismatch");
  double total = 0.0;
  std::vector<double> slope(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(targets[i] > 0.0)) throw DataError("loss: nonpositive target");
    const double diff = p[i] - targets[i];
    total += std::abs(diff) / targets[i];
    slope[i] = weight * (diff > 0.0 ? 1.0 : diff < 0.0 ? -1.0 : 0.0) / targets[i];
  }
  return tape.custom("mape", {weight * total}, [predictions, slope = std::move(slope)](Tape& t, std::span<const double> g) {
    std::vector<double> grad(slope.size());
    for (std::size_t i = 0; i < slope.size(); ++i) grad[i] = g[0] * slope[i];
    t.accumulate(predictions, grad);
  });
}

}  // namespace netxfer::rnmodel
