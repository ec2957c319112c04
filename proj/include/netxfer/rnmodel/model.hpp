#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "netxfer/dataio/normalizer.hpp"
#include "netxfer/ndiff/layers.hpp"
#include "netxfer/ndiff/param_store.hpp"
#include "netxfer/ndiff/tape.hpp"
#include "netxfer/rnmodel/prepare.hpp"

namespace netxfer::rnmodel {

struct ModelConfig {
  std::size_t embedding_dim = 32;
  std::size_t mpa_iterations = 8;
  double window_length = dataio::kDefaultWindowLength;
  // Encoder MLP widths; the last one must equal embedding_dim.
  std::vector<std::size_t> encoder_widths{32, 32};
  // Hidden readout widths; a final width-1 layer is appended.
  std::vector<std::size_t> readout_widths{32, 32};

  void validate() const;  // ConfigError
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

nlohmann::json model_config_to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

struct ForwardOptions {
  // When false every window re-encodes its queues from features alone, with
  // no state carried over from the previous window.
  bool window_memory = true;
};

// Embeddings after message passing for one window, plus readout outputs.
struct WindowForward {
  std::vector<ndiff::Var> flows;   // aligned with PreparedWindow::active
  std::vector<ndiff::Var> queues;  // all queues
  std::vector<ndiff::Var> links;   // all links
  ndiff::Var predictions;          // one delay per active flow, seconds; invalid if none active
};

struct ScenarioForward {
  std::vector<WindowForward> windows;
};

// Windowed message-passing delay model. Blocks:
//   Encoding: flow, link and queue encoder MLPs.
//   Mpa:      flow, queue, link and inter-window queue GRUs.
//   Readout:  MLP on final flow embeddings, then target_scale * softplus.
class Model {
 public:
  explicit Model(ModelConfig config, dataio::Normalizer normalizer = {});

  Model(const Model&) = default;
  Model& operator=(const Model&) = default;

  const ModelConfig& config() const { return config_; }
  const dataio::Normalizer& normalizer() const { return normalizer_; }
  void set_normalizer(dataio::Normalizer n) { normalizer_ = std::move(n); }
  ndiff::ParamStore& params() { return params_; }
  const ndiff::ParamStore& params() const { return params_; }

  void init(std::uint64_t seed) { ndiff::glorot_init(params_, seed); }

  // Records the full scenario (all windows in order) on the tape.
  ScenarioForward forward(ndiff::Tape& tape, const PreparedScenario& scenario, const ForwardOptions& options = {}) const;

  // Stage entry points, exposed for testing.
  struct Embeddings {
    std::vector<ndiff::Var> flows, queues, links;
  };
  Embeddings encode(ndiff::Tape& tape, const PreparedWindow& window, const ndiff::Var* previous_queues) const;
  void message_pass(ndiff::Tape& tape, const PreparedScenario& scenario, const PreparedWindow& window,
                    Embeddings& state) const;
  ndiff::Var readout(ndiff::Tape& tape, std::span<const ndiff::Var> flows) const;

  // Predicted delays per window per active flow, seconds.
  std::vector<std::vector<double>> predict(const PreparedScenario& scenario, const ForwardOptions& options = {}) const;

 private:
  ModelConfig config_;
  dataio::Normalizer normalizer_;
  ndiff::ParamStore params_;
  ndiff::Mlp flow_encoder_, link_encoder_, queue_encoder_;
  ndiff::GruCell flow_gru_, queue_gru_, link_gru_, window_gru_;
  ndiff::Mlp readout_;
};

// Masked mean absolute percentage error as a fraction. Adds sum |p - t| / t
// over a window's active flows, scaled by weight, into a scalar tape node.
ndiff::Var relative_error_sum(ndiff::Tape& tape, ndiff::Var predictions, std::span<const double> targets, double weight);

}  // namespace netxfer::rnmodel
