#include "netxfer/evalx/report.hpp"

#include <ostream>

#include "json.hpp"
#include "netxfer/errors.hpp"
#include "netxfer/rnmodel/prepare.hpp"

namespace netxfer::evalx {

std::vector<double> EvalReport::predictions() const {
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& s : samples) v.push_back(s.predicted);
  return v;
}

std::vector<double> EvalReport::targets() const {
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& s : samples) v.push_back(s.target);
  return v;
}

EvalReport make_report(std::vector<EvalSample> samples) {
  EvalReport r{std::move(samples), 0.0};
  r.mape = mape(r.predictions(), r.targets());
  return r;
}

EvalReport evaluate(const rnmodel::Model& model, std::span<const dataio::WindowedScenario> scenarios) {
  std::vector<EvalSample> samples;
  for (const auto& ws : scenarios) {
    const auto prepared = rnmodel::prepare(ws, model.normalizer());
    const auto pred = model.predict(prepared);
    for (std::size_t w = 0; w < prepared.windows.size(); ++w) {
      const auto& pw = prepared.windows[w];
      for (std::size_t i = 0; i < pw.active.size(); ++i)
        samples.push_back({ws.scenario_id, static_cast<std::uint32_t>(w), ws.graph.flows[pw.active[i]].id, pred[w][i],
                           pw.targets[i]});
    }
  }
  return make_report(std::move(samples));
}

double normalized_mape(const EvalReport& model, const EvalReport& baseline) {
  if (model.count() != baseline.count()) throw DataError("normalized_mape: reports cover different samples");
  for (std::size_t i = 0; i < model.count(); ++i) {
    const auto &a = model.samples[i], &b = baseline.samples[i];
    if (a.scenario != b.scenario || a.window != b.window || a.flow != b.flow)
      throw DataError("normalized_mape: reports cover different samples");
  }
  return normalized_mape(model.mape, baseline.mape);
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  const auto precision = out.precision(10);
  out << "label,mape,normalized_mape,mean_signed_error,count\n";
  for (const auto& r : rows)
    out << r.label << ',' << r.mape << ',' << r.normalized << ',' << r.mean_signed_error << ',' << r.count << '\n';
  out.precision(precision);
}

void write_samples_ndjson(std::ostream& out, const EvalReport& report) {
  for (const auto& s : report.samples)
    out << nlohmann::json{{"scenario", s.scenario},
                          {"window", s.window},
                          {"flow", s.flow},
                          {"predicted", s.predicted},
                          {"target", s.target},
                          {"relative_error", (s.predicted - s.target) / s.target}}
               .dump()
        << '\n';
}

void write_pdf_csv(std::ostream& out, const ErrorPdf& pdf) {
  const auto precision = out.precision(10);
  out << "bin_lo,bin_hi,density\n";
  for (std::size_t b = 0; b < pdf.density.size(); ++b) out << pdf.edges[b] << ',' << pdf.edges[b + 1] << ',' << pdf.density[b] << '\n';
  out.precision(precision);
}

}  // namespace netxfer::evalx
