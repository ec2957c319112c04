#include "netxfer/transfer/gtot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netxfer/errors.hpp"

namespace netxfer::transfer {

void GtotConfig::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("gtot: lambda must be >= 0");
  if (!(epsilon > 0.0)) throw ConfigError("gtot: epsilon must be > 0");
  if (iterations < 1) throw ConfigError("gtot: iterations must be >= 1");
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp(std::span<const double> x) {
  double m = kNegInf;
  for (double v : x) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace

TransportPlan masked_sinkhorn(std::span<const double> cost, std::span<const std::uint8_t> mask, std::size_t n,
                              double epsilon, std::size_t iterations) {
  if (cost.size() != n * n || mask.size() != n * n) throw ConfigError("sinkhorn: cost/mask size mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (!mask[i * n + i]) throw ConfigError("sinkhorn: mask must contain self-loops");
  const double log_marginal = -std::log(static_cast<double>(n));
  std::vector<double> f(n, 0.0), g(n, 0.0), buf(n);
  for (std::size_t it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) buf[j] = mask[i * n + j] ? (g[j] - cost[i * n + j]) / epsilon : kNegInf;
      f[i] = epsilon * (log_marginal - logsumexp(buf));
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) buf[i] = mask[i * n + j] ? (f[i] - cost[i * n + j]) / epsilon : kNegInf;
      g[j] = epsilon * (log_marginal - logsumexp(buf));
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(f[i]) || !std::isfinite(g[i]))
      throw NumericError("sinkhorn: non-finite scaling vectors; try a larger epsilon");
  TransportPlan out;
  out.n = n;
  out.plan.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (mask[i * n + j]) {
        const double p = std::exp((f[i] + g[j] - cost[i * n + j]) / epsilon);
        out.plan[i * n + j] = p;
        out.distance += p * cost[i * n + j];
      }
  if (!std::isfinite(out.distance)) throw NumericError("sinkhorn: non-finite transport cost; try a larger epsilon");
  return out;
}

std::vector<std::uint8_t> gtot_mask(const rnmodel::PreparedScenario& scenario, const rnmodel::PreparedWindow& window) {
  const auto& graph = scenario.graph;
  const std::size_t flows = window.active.size(), queues = graph.queues.size();
  const std::size_t n = flows + queues + graph.links.size();
  std::vector<std::uint8_t> mask(n * n, 0);
  auto allow = [&](std::size_t a, std::size_t b) { mask[a * n + b] = mask[b * n + a] = 1; };
  for (std::size_t i = 0; i < n; ++i) mask[i * n + i] = 1;
  for (std::size_t i = 0; i < flows; ++i)
    for (std::size_t q : graph.flows[window.active[i]].path) allow(i, flows + q);
  for (std::size_t q = 0; q < queues; ++q) allow(flows + q, flows + queues + graph.queues[q].link);
  return mask;
}

ndiff::Var gtot_distance(ndiff::Tape& tape, std::span<const ndiff::Var> receiver, const std::vector<std::vector<double>>& donor,
                         std::span<const std::uint8_t> mask, const GtotConfig& config) {
  config.validate();
  const std::size_t n = receiver.size();
  if (donor.size() != n) throw ConfigError("gtot: receiver and donor entity counts differ");
  std::vector<double> cost(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = tape.value(receiver[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (!mask[i * n + j]) continue;
      if (donor[j].size() != e.size()) throw ConfigError("gtot: embedding width mismatch");
      double c = 0.0;
      for (std::size_t k = 0; k < e.size(); ++k) c += (e[k] - donor[j][k]) * (e[k] - donor[j][k]);
      cost[i * n + j] = c;
    }
  }
  TransportPlan tp = masked_sinkhorn(cost, mask, n, config.epsilon, config.iterations);
  return tape.custom("gtot", {tp.distance},
                     [inputs = std::vector<ndiff::Var>(receiver.begin(), receiver.end()), donor, plan = std::move(tp.plan),
                      n](ndiff::Tape& t, std::span<const double> g) {
                       for (std::size_t i = 0; i < n; ++i) {
                         const auto e = t.value(inputs[i]);
                         std::vector<double> grad(e.size(), 0.0);
                         for (std::size_t j = 0; j < n; ++j) {
                           const double p = plan[i * n + j];
                           if (p == 0.0) continue;
                           for (std::size_t k = 0; k < e.size(); ++k) grad[k] += 2.0 * g[0] * p * (e[k] - donor[j][k]);
                         }
                         t.accumulate(inputs[i], grad);
                       }
                     });
}

}  // namespace netxfer::transfer
