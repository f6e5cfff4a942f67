#pragma once

#include <compare>
#include <cstdint>
#include <span>

#include "switchpair/errors.hpp"

namespace switchpair {

// A device's minimal time measurement (temporal precision), in milliseconds.
struct DevicePrecision {
  double tp_ms = 0.0;
};

// Quantized timestamp: the count of whole delay-tolerance intervals elapsed
// since the synchronized epoch. Ticks are the only timing values that ever
// enter cryptographic material.
struct Tick {
  std::uint64_t index = 0;
  auto operator<=>(const Tick&) const = default;
};

// Bins an elapsed time into its tick: floor(elapsed / tau). Two raw times
// less than tau apart land in the same bin unless they straddle a bin edge;
// the pairing fault tolerance absorbs those edge cases.
Tick quantize(double elapsed_ms, double tau_ms);

// Common delay tolerance for two or more devices: the maximum of their
// temporal precisions.
double common_delay_tolerance(std::span<const DevicePrecision> precisions);

}  // namespace switchpair
