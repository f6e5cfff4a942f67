#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "switchpair/rng.hpp"
#include "switchpair/timebase.hpp"

namespace switchpair {

// A simulated device on the shared power source: its clock precision, the
// lag between a switch actuation and the device actually seeing the power
// change, and an optional constant clock skew for stress tests.
struct DeviceProfile {
  DevicePrecision precision{50.0};
  rng::Distribution delay_model = rng::Distribution::uniform(0.0, 30.0);
  double clock_skew_ms = 0.0;
};

// Throws unless the delay model is constant, uniform or truncated-normal
// with non-negative support.
void validate_profile(const DeviceProfile& profile);

// User switch actuation instants relative to the synchronized epoch,
// strictly increasing.
struct PressSchedule {
  std::vector<double> press_times_ms;
};

// One row of observed event times per device, one entry per press.
struct EventTrace {
  std::vector<std::vector<double>> observed_ms;
};

// Draws n press times whose gaps follow the interval model (human cadence,
// mean around 8 s by default). Pairing requires more than four presses.
PressSchedule sample_press_schedule(int n,
                                    const rng::Distribution& interval_model,
                                    std::uint64_t seed);

// What one device records for each press: press time plus a sampled delay,
// plus the device's clock skew. Deterministic per (seed, device_index).
std::vector<double> observe(const DeviceProfile& profile,
                            const PressSchedule& schedule, std::uint64_t seed,
                            std::uint32_t device_index = 0);

// Fans observe() across all devices sharing the power source.
EventTrace run_trace(std::span<const DeviceProfile> profiles,
                     const PressSchedule& schedule, std::uint64_t seed);

// Second-power-source model: the same user pressing another switch with the
// other hand. Each press is shifted by a sampled inter-hand offset and the
// result re-sorted into time order.
PressSchedule offset_schedule(const PressSchedule& schedule,
                              const rng::Distribution& offset_model,
                              std::uint64_t seed, std::uint32_t hand_index = 1);

// Moves each press to the center of its tick bin, the controlled timing
// regime used by the agreement experiments.
void snap_to_bin_centers(PressSchedule& schedule, double tau_ms);

// Debug dump: device_id, press_index, press_ms, observed_ms, tick.
void write_trace_csv(std::ostream& os, const PressSchedule& schedule,
                     const EventTrace& trace, double tau_ms);

}  // namespace switchpair
