#include "switchpair/timebase.hpp"

#include <cmath>

namespace switchpair {

Tick quantize(double elapsed_ms, double tau_ms) {
  if (!std::isfinite(tau_ms) || tau_ms <= 0.0)
    throw InvalidInputError("quantize: tau must be a positive finite value");
  if (!std::isfinite(elapsed_ms) || elapsed_ms < 0.0)
    throw InvalidInputError(
        "quantize: elapsed time must be a non-negative finite value");
  return Tick{static_cast<std::uint64_t>(std::floor(elapsed_ms / tau_ms))};
}

double common_delay_tolerance(std::span<const DevicePrecision> precisions) {
  if (precisions.size() < 2)
    throw InvalidInputError(
        "common_delay_tolerance: at least two devices required");
  double max_tp = 0.0;
  for (const auto& p : precisions) {
    if (!std::isfinite(p.tp_ms) || p.tp_ms <= 0.0)
      throw InvalidInputError(
          "common_delay_tolerance: precisions must be positive");
    max_tp = std::max(max_tp, p.tp_ms);
  }
  return max_tp;
}

}  // namespace switchpair
