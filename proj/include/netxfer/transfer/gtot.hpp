#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "netxfer/ndiff/tape.hpp"
#include "netxfer/rnmodel/prepare.hpp"

namespace netxfer::transfer {

struct GtotConfig {
  double lambda = 0.1;
  double epsilon = 1e-2;
  std::size_t iterations = 50;

  void validate() const;
};

struct TransportPlan {
  std::size_t n = 0;
  std::vector<double> plan;  // n x n row-major
  double distance = 0.0;     // <plan, cost>
};

// Entropic optimal transport between two uniform distributions over n points,
// restricted to mask (n x n, nonzero = allowed). Log-domain Sinkhorn with a
// fixed iteration count; the mask must contain the diagonal. NumericError if
// the scalings stop being finite.
TransportPlan masked_sinkhorn(std::span<const double> cost, std::span<const std::uint8_t> mask, std::size_t n,
                              double epsilon, std::size_t iterations);

// Entity order: active flows, then queues, then links. Allowed pairs are the
// flow-queue and queue-link incidences (both directions) plus self-loops.
std::vector<std::uint8_t> gtot_mask(const rnmodel::PreparedScenario& scenario, const rnmodel::PreparedWindow& window);

// Masked Wasserstein distance between receiver embeddings (on the tape) and
// constant donor embeddings, with squared Euclidean cost. The gradient holds
// the transport plan fixed.
ndiff::Var gtot_distance(ndiff::Tape& tape, std::span<const ndiff::Var> receiver, const std::vector<std::vector<double>>& donor,
                         std::span<const std::uint8_t> mask, const GtotConfig& config);

}  // namespace netxfer::transfer
