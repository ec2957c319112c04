#include <algorithm>
#include <cmath>
#include <ostream>

#include "netxfer/cli/commands.hpp"
#include "netxfer/netsim/rng.hpp"
#include "netxfer/rnmodel/model.hpp"

namespace netxfer::cli {

namespace {

rnmodel::PreparedScenario builtin_scenario() {
  rnmodel::PreparedScenario s;
  for (std::uint32_t q = 0; q < 3; ++q) {
    s.graph.links.push_back({q, q, q + 1, 1e7, 1e-4});
    s.graph.queues.push_back({q, q, 1000.0});
  }
  s.graph.flows = {{0, {0, 1}}, {1, {1, 2}}};
  netsim::CounterRng rng(17, 0);
  auto vec = [&](std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
  };
  for (int w = 0; w < 2; ++w) {
    rnmodel::PreparedWindow pw;
    pw.active = {0, 1};
    pw.flow_features = {vec(dataio::kFlowFeatureCount), vec(dataio::kFlowFeatureCount)};
    // Targets far from any plausible prediction keep |p - t| away from its kink.
    pw.targets = {0.5, 0.8};
    for (int q = 0; q < 3; ++q) {
      pw.link_features.push_back(vec(dataio::kLinkFeatureCount));
      pw.queue_features.push_back(vec(dataio::kQueueFeatureCount));
    }
    s.windows.push_back(std::move(pw));
  }
  return s;
}

}  // namespace

bool run_gradcheck(std::ostream& out, bool corrupt) {
  rnmodel::ModelConfig cfg;
  cfg.embedding_dim = 4;
  cfg.mpa_iterations = 2;
  cfg.encoder_widths = {6, 4};
  cfg.readout_widths = {5};
  dataio::Normalizer norm;
  norm.target_scale = 0.01;
  rnmodel::Model model(cfg, norm);
  model.init(123);
  netsim::CounterRng rng(99, 1);
  for (auto& p : model.params())
    if (p.shape.size() == 1)
      for (double& x : p.value) x = rng.uniform(-0.3, 0.3);
  const auto scenario = builtin_scenario();
  auto& store = model.params();

  auto loss = [&](ndiff::GradBuffer* grads) {
    ndiff::Tape tape(store);
    const auto fw = model.forward(tape, scenario);
    std::vector<ndiff::Var> terms;
    for (std::size_t w = 0; w < scenario.windows.size(); ++w)
      terms.push_back(rnmodel::relative_error_sum(tape, fw.windows[w].predictions, scenario.windows[w].targets, 0.25));
    const ndiff::Var total = tape.sum(terms);
    if (grads) tape.backward(total, *grads);
    return tape.scalar(total);
  };

  auto grads = store.make_grad_buffer();
  loss(&grads);
  if (corrupt) grads[0][0] += 0.5;

  // Relative error; kFloor only guards entries whose gradient is numerically zero.
  const double h = 1e-4, tol = 1e-4, kFloor = 1e-6;
  std::size_t checked = 0, failed = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < store.size(); ++i) {
    double param_worst = 0.0;
    for (std::size_t k = 0; k < store[i].size(); ++k) {
      const double w = store[i].value[k];
      store[i].value[k] = w + h;
      const double up = loss(nullptr);
      store[i].value[k] = w - h;
      const double down = loss(nullptr);
      store[i].value[k] = w;
      const double numeric = (up - down) / (2.0 * h);
      const double err = std::abs(grads[i][k] - numeric) / std::max({std::abs(grads[i][k]), std::abs(numeric), kFloor});
      param_worst = std::max(param_worst, err);
      ++checked;
      if (err >= tol) ++failed;
    }
    worst = std::max(worst, param_worst);
    out << "  " << store[i].name << " max_rel_err " << param_worst << (param_worst >= tol ? "  FAIL" : "") << '\n';
  }
  const bool pass = failed == 0;
  out << "gradcheck: " << (pass ? "PASS" : "FAIL") << " (" << checked << " entries, " << failed << " over tolerance " << tol
      << ", worst " << worst << ")\n";
  return pass;
}

}  // namespace netxfer::cli
