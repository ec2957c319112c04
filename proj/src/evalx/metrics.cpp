#include "netxfer/evalx/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "netxfer/errors.hpp"

namespace netxfer::evalx {

namespace {

void check_pairs(std::span<const double> p, std::span<const double> t) {
  if (p.empty()) throw DataError("mape: empty input");
  if (p.size() != t.size()) throw DataError("mape: prediction/target length mismatch");
  for (double x : t)
    if (!(x > 0.0)) throw DataError("mape: nonpositive target");
}

}  // namespace

double mape(std::span<const double> predictions, std::span<const double> targets) {
  check_pairs(predictions, targets);
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) sum += std::abs(predictions[i] - targets[i]) / targets[i];
  return 100.0 * sum / static_cast<double>(predictions.size());
}

double normalized_mape(double model_mape, double baseline_mape) {
  if (baseline_mape == 0.0) throw DataError("normalized_mape: baseline MAPE is zero");
  return model_mape / baseline_mape;
}

ErrorPdf error_pdf(std::span<const double> predictions, std::span<const double> targets, std::size_t bins) {
  if (bins < 2) throw ConfigError("error_pdf: need at least 2 bins");
  check_pairs(predictions, targets);
  std::vector<double> err(predictions.size());
  for (std::size_t i = 0; i < err.size(); ++i) err[i] = (predictions[i] - targets[i]) / targets[i];
  auto [lo_it, hi_it] = std::minmax_element(err.begin(), err.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi - lo <= 0.0) {
    lo -= 0.5;
    hi += 0.5;
  }
  ErrorPdf pdf;
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) pdf.edges.push_back(b == bins ? hi : lo + width * static_cast<double>(b));
  std::vector<double> counts(bins, 0.0);
  double sum = 0.0;
  for (double e : err) {
    const auto b = std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, std::floor((e - lo) / width))));
    counts[b] += 1.0;
    sum += e;
  }
  for (std::size_t b = 0; b < bins; ++b)
    pdf.density.push_back(counts[b] / (static_cast<double>(err.size()) * (pdf.edges[b + 1] - pdf.edges[b])));
  pdf.mean_error = sum / static_cast<double>(err.size());
  return pdf;
}

}  // namespace netxfer::evalx
