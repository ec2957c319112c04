#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "netxfer/dataio/windows.hpp"
#include "netxfer/evalx/metrics.hpp"
#include "netxfer/rnmodel/model.hpp"

namespace netxfer::evalx {

struct EvalSample {
  std::uint64_t scenario = 0;
  std::uint32_t window = 0;
  std::uint32_t flow = 0;  // flow id
  double predicted = 0.0;  // seconds
  double target = 0.0;     // seconds
};

// Active flow-windows only.
struct EvalReport {
  std::vector<EvalSample> samples;
  double mape = 0.0;  // percent

  std::size_t count() const { return samples.size(); }
  std::vector<double> predictions() const;
  std::vector<double> targets() const;
};

EvalReport make_report(std::vector<EvalSample> samples);

// Prepares scenarios with the model's own normalizer and predicts every active flow-window.
EvalReport evaluate(const rnmodel::Model& model, std::span<const dataio::WindowedScenario> scenarios);

// Both reports must cover the same flow-windows; DataError otherwise.
double normalized_mape(const EvalReport& model, const EvalReport& baseline);

struct MetricsRow {
  std::string label;
  double mape = 0.0;
  double normalized = 0.0;  // relative to the baseline row; 1 for the baseline itself
  double mean_signed_error = 0.0;
  std::size_t count = 0;
};

// label,mape,normalized_mape,mean_signed_error,count
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);
// {"scenario","window","flow","predicted","target","relative_error"} per line.
void write_samples_ndjson(std::ostream& out, const EvalReport& report);
// bin_lo,bin_hi,density
void write_pdf_csv(std::ostream& out, const ErrorPdf& pdf);

}  // namespace netxfer::evalx
