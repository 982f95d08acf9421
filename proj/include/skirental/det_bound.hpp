#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace skirental {

struct DetLBReport {
  double gamma = 0.0;
  std::vector<double> sequence;                 // a_1, a_2, ...
  std::optional<std::size_t> first_nonpositive;  // 1-based; iteration stops there
  std::optional<double> limit;                   // fixed point, for gamma >= 4
};

/// a_1 = gamma - 1, a_i = gamma - gamma / a_{i-1}; at most `count` terms.
inline DetLBReport det_lb_sequence(double gamma, std::size_t count) {
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be at least 1");
  if (count < 1) throw std::invalid_argument("count must be at least 1");
  DetLBReport r;
  r.gamma = gamma;
  r.sequence.reserve(std::min<std::size_t>(count, 1 << 20));
  double a = gamma - 1.0;
  for (std::size_t i = 1; i <= count; ++i) {
    if (i > 1) a = gamma - gamma / a;
    r.sequence.push_back(a);
    if (a <= 0.0) {
      r.first_nonpositive = i;
      break;
    }
  }
  if (gamma >= 4.0) r.limit = (gamma + std::sqrt(gamma * gamma - 4.0 * gamma)) / 2.0;
  return r;
}

/// Lower bound on deterministic ratio with trust lambda in (0, 1).
inline double det_tradeoff_bound(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
  return 2.0 + lambda + 1.0 / lambda;
}

}  // namespace skirental
