#pragma once

#include <span>
#include <vector>

#include "json.hpp"
#include "netxfer/dataio/windows.hpp"

namespace netxfer::dataio {

// Per-column z-score statistics. Constant columns get sd = 1 so they map to 0.
struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> sd;

  static FeatureStats fit(std::span<const std::vector<double>> rows, std::size_t width);
  // Identity statistics (mean 0, sd 1).
  static FeatureStats identity(std::size_t width);

  void normalize(std::span<double> row) const;
  void denormalize(std::span<double> row) const;

  friend bool operator==(const FeatureStats&, const FeatureStats&) = default;
};

// Statistics for the three entity feature groups plus the delay scale the
// readout multiplies into its output. Fit on the training split only; apply()
// is not idempotent: normalizing twice shifts the data again.
struct Normalizer {
  FeatureStats flow = FeatureStats::identity(kFlowFeatureCount);
  FeatureStats link = FeatureStats::identity(kLinkFeatureCount);
  FeatureStats queue = FeatureStats::identity(kQueueFeatureCount);
  double target_scale = 1.0;  // mean target over active training samples

  friend bool operator==(const Normalizer&, const Normalizer&) = default;
};

// Throws DataError when the training split has no active flow-window.
Normalizer fit_normalizer(std::span<const WindowedScenario> training);

// Flow feature z-scoring of samples; targets are left untouched.
std::vector<WindowSample> apply_normalizer(const Normalizer& n, std::span<const WindowSample> samples);
std::vector<WindowSample> denormalize(const Normalizer& n, std::span<const WindowSample> samples);

nlohmann::json normalizer_to_json(const Normalizer& n);
Normalizer normalizer_from_json(const nlohmann::json& j);

}  // namespace netxfer::dataio
