#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "netxfer/ndiff/param_store.hpp"

namespace netxfer::testing {

struct GradMismatch {
  std::string param;
  std::size_t element;
  double analytic;
  double numeric;
};

// Central differences on every element of every trainable parameter.
// loss() must recompute the objective from the store's current values.
inline std::vector<GradMismatch> finite_difference_check(ndiff::ParamStore& store, const ndiff::GradBuffer& analytic,
                                                         const std::function<double()>& loss, double h = 1e-6,
                                                         double tolerance = 1e-4) {
  std::vector<GradMismatch> bad;
  for (std::size_t i = 0; i < store.size(); ++i) {
    auto& p = store[i];
    if (!p.trainable) continue;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double saved = p.value[k];
      p.value[k] = saved + h;
      const double up = loss();
      p.value[k] = saved - h;
      const double down = loss();
      p.value[k] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[i][k];
      if (std::abs(a - numeric) / std::max(1.0, std::abs(a)) >= tolerance) bad.push_back({p.name, k, a, numeric});
    }
  }
  return bad;
}

}  // namespace netxfer::testing
