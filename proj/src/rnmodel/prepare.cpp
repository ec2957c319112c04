#include "netxfer/rnmodel/prepare.hpp"

namespace netxfer::rnmodel {

std::size_t PreparedScenario::active_count() const {
  std::size_t n = 0;
  for (const auto& w : windows) n += w.active.size();
  return n;
}

PreparedScenario prepare(const dataio::WindowedScenario& ws, const dataio::Normalizer& normalizer) {
  PreparedScenario out;
  out.scenario_id = ws.scenario_id;
  out.graph = ws.graph;
  out.windows.resize(ws.num_windows);
  for (std::size_t w = 0; w < ws.num_windows; ++w) {
    PreparedWindow& pw = out.windows[w];
    for (std::size_t f = 0; f < ws.num_flows(); ++f) {
      const auto& s = ws.at(w, f);
      if (!s.active()) continue;
      std::vector<double> x(s.features.begin(), s.features.end());
      normalizer.flow.normalize(x);
      pw.active.push_back(f);
      pw.flow_features.push_back(std::move(x));
      pw.targets.push_back(s.target);
    }
    for (const auto& l : ws.link_features(w)) {
      std::vector<double> x(l.begin(), l.end());
      normalizer.link.normalize(x);
      pw.link_features.push_back(std::move(x));
    }
    for (const auto& q : ws.queue_features(w)) {
      std::vector<double> x(q.begin(), q.end());
      normalizer.queue.normalize(x);
      pw.queue_features.push_back(std::move(x));
    }
  }
  return out;
}

std::vector<PreparedScenario> prepare_all(std::span<const dataio::WindowedScenario> scenarios,
                                          const dataio::Normalizer& normalizer) {
  std::vector<PreparedScenario> out;
  out.reserve(scenarios.size());
  for (const auto& ws : scenarios) out.push_back(prepare(ws, normalizer));
  return out;
}

}  // namespace netxfer::rnmodel
