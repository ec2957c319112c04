#include "netxfer/dataio/normalizer.hpp"

#include <cmath>

#include "netxfer/errors.hpp"

namespace netxfer::dataio {

FeatureStats FeatureStats::fit(std::span<const std::vector<double>> rows, std::size_t width) {
  if (rows.empty()) throw DataError("normalizer: nothing to fit");
  FeatureStats s{std::vector<double>(width, 0.0), std::vector<double>(width, 0.0)};
  const auto n = static_cast<double>(rows.size());
  for (const auto& r : rows)
    for (std::size_t c = 0; c < width; ++c) s.mean[c] += r[c];
  for (double& m : s.mean) m /= n;
  for (const auto& r : rows)
    for (std::size_t c = 0; c < width; ++c) s.sd[c] += (r[c] - s.mean[c]) * (r[c] - s.mean[c]);
  for (std::size_t c = 0; c < width; ++c) {
    s.sd[c] = std::sqrt(s.sd[c] / n);
    // Relative threshold: values that only differ by rounding count as constant.
    if (!(s.sd[c] > 1e-12 * std::max(1.0, std::abs(s.mean[c])))) s.sd[c] = 1.0;
  }
  return s;
}

FeatureStats FeatureStats::identity(std::size_t width) {
  return FeatureStats{std::vector<double>(width, 0.0), std::vector<double>(width, 1.0)};
}

void FeatureStats::normalize(std::span<double> row) const {
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean[c]) / sd[c];
}

void FeatureStats::denormalize(std::span<double> row) const {
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = row[c] * sd[c] + mean[c];
}

Normalizer fit_normalizer(std::span<const WindowedScenario> training) {
  std::vector<std::vector<double>> flows, links, queues;
  double target_sum = 0.0;
  for (const auto& ws : training) {
    for (const auto& s : ws.samples) {
      if (!s.active()) continue;
      flows.emplace_back(s.features.begin(), s.features.end());
      target_sum += s.target;
    }
    for (std::size_t w = 0; w < ws.num_windows; ++w) {
      for (const auto& l : ws.link_features(w)) links.emplace_back(l.begin(), l.end());
      for (const auto& q : ws.queue_features(w)) queues.emplace_back(q.begin(), q.end());
    }
  }
  if (flows.empty()) throw DataError("normalizer: training split has no active flow-window");
  Normalizer n;
  n.flow = FeatureStats::fit(flows, kFlowFeatureCount);
  n.link = FeatureStats::fit(links, kLinkFeatureCount);
  n.queue = FeatureStats::fit(queues, kQueueFeatureCount);
  n.target_scale = target_sum / static_cast<double>(flows.size());
  return n;
}

std::vector<WindowSample> apply_normalizer(const Normalizer& n, std::span<const WindowSample> samples) {
  std::vector<WindowSample> out(samples.begin(), samples.end());
  for (auto& s : out) n.flow.normalize(s.features);
  return out;
}

std::vector<WindowSample> denormalize(const Normalizer& n, std::span<const WindowSample> samples) {
  std::vector<WindowSample> out(samples.begin(), samples.end());
  for (auto& s : out) n.flow.denormalize(s.features);
  return out;
}

namespace {

nlohmann::json stats_to_json(const FeatureStats& s) { return {{"mean", s.mean}, {"sd", s.sd}}; }

FeatureStats stats_from_json(const nlohmann::json& j, std::size_t width) {
  FeatureStats s{j.at("mean").get<std::vector<double>>(), j.at("sd").get<std::vector<double>>()};
  if (s.mean.size() != width || s.sd.size() != width) throw ConfigError("normalizer: wrong feature count");
  return s;
}

}  // namespace

nlohmann::json normalizer_to_json(const Normalizer& n) {
  return {{"flow", stats_to_json(n.flow)},
          {"link", stats_to_json(n.link)},
          {"queue", stats_to_json(n.queue)},
          {"target_scale", n.target_scale}};
}

Normalizer normalizer_from_json(const nlohmann::json& j) {
  Normalizer n;
  n.flow = stats_from_json(j.at("flow"), kFlowFeatureCount);
  n.link = stats_from_json(j.at("link"), kLinkFeatureCount);
  n.queue = stats_from_json(j.at("queue"), kQueueFeatureCount);
  n.target_scale = j.at("target_scale").get<double>();
  return n;
}

}  // namespace netxfer::dataio
