#pragma once

#include <span>
#include <vector>

namespace netxfer::evalx {

// 100 * mean(|p - t| / t). DataError on empty input, length mismatch or a
// nonpositive target.
double mape(std::span<const double> predictions, std::span<const double> targets);

// model / baseline. DataError when the baseline is zero.
double normalized_mape(double model_mape, double baseline_mape);

struct ErrorPdf {
  std::vector<double> edges;    // bins + 1
  std::vector<double> density;  // sum(density * width) = 1
  double mean_error = 0.0;      // mean signed relative error
};

// Histogram of the signed relative error (p - t) / t over [min, max] of the
// errors, widened by 0.5 on each side when all errors coincide. Bins are
// half-open except the last. ConfigError when bins < 2.
ErrorPdf error_pdf(std::span<const double> predictions, std::span<const double> targets, std::size_t bins);

}  // namespace netxfer::evalx
