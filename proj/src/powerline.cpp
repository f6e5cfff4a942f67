#include "switchpair/powerline.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace switchpair {

void validate_profile(const DeviceProfile& profile) {
  if (!(profile.precision.tp_ms > 0.0) ||
      !std::isfinite(profile.precision.tp_ms))
    throw InvalidInputError("device profile: precision must be positive");
  switch (profile.delay_model.family) {
    case rng::DistFamily::Constant:
    case rng::DistFamily::Uniform:
    case rng::DistFamily::TruncatedNormal:
      break;
    case rng::DistFamily::LogNormal:
      throw InvalidInputError(
          "device profile: delay model must be constant, uniform or normal");
  }
  if (profile.delay_model.min_value() < 0.0)
    throw InvalidInputError("device profile: delays must be non-negative");
  if (!std::isfinite(profile.clock_skew_ms))
    throw InvalidInputError("device profile: skew must be finite");
}

PressSchedule sample_press_schedule(int n,
                                    const rng::Distribution& interval_model,
                                    std::uint64_t seed) {
  if (n <= 4)
    throw PreconditionError(
        "press schedule: pairing needs more than four presses");
  rng::Stream stream(seed, rng::Purpose::Schedule);
  PressSchedule schedule;
  schedule.press_times_ms.reserve(static_cast<std::size_t>(n));
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    const double gap = std::max(interval_model.sample(stream), 1e-3);
    t += gap;
    schedule.press_times_ms.push_back(t);
  }
  return schedule;
}

std::vector<double> observe(const DeviceProfile& profile,
                            const PressSchedule& schedule, std::uint64_t seed,
                            std::uint32_t device_index) {
  validate_profile(profile);
  if (schedule.press_times_ms.empty())
    throw InvalidInputError("observe: empty press schedule");
  rng::Stream stream(seed, rng::Purpose::DeviceDelay, device_index);
  std::vector<double> observed;
  observed.reserve(schedule.press_times_ms.size());
  for (const double press : schedule.press_times_ms) {
    const double delay = profile.delay_model.sample(stream);
    observed.push_back(press + delay + profile.clock_skew_ms);
  }
  return observed;
}

EventTrace run_trace(std::span<const DeviceProfile> profiles,
                     const PressSchedule& schedule, std::uint64_t seed) {
  if (profiles.size() < 2)
    throw InvalidInputError("run_trace: at least two devices required");
  EventTrace trace;
  trace.observed_ms.reserve(profiles.size());
  for (std::size_t d = 0; d < profiles.size(); ++d)
    trace.observed_ms.push_back(
        observe(profiles[d], schedule, seed, static_cast<std::uint32_t>(d)));
  return trace;
}

PressSchedule offset_schedule(const PressSchedule& schedule,
                              const rng::Distribution& offset_model,
                              std::uint64_t seed, std::uint32_t hand_index) {
  rng::Stream stream(seed, rng::Purpose::SourceOffset, hand_index);
  PressSchedule shifted;
  shifted.press_times_ms.reserve(schedule.press_times_ms.size());
  for (const double press : schedule.press_times_ms)
    shifted.press_times_ms.push_back(
        std::max(press + offset_model.sample(stream), 0.0));
  // A hand occasionally lands out of order; presses still happen in time
  // order, so re-sort and keep the sequence strictly increasing.
  std::sort(shifted.press_times_ms.begin(), shifted.press_times_ms.end());
  for (std::size_t i = 1; i < shifted.press_times_ms.size(); ++i)
    if (shifted.press_times_ms[i] <= shifted.press_times_ms[i - 1])
      shifted.press_times_ms[i] = shifted.press_times_ms[i - 1] + 1e-3;
  return shifted;
}

void snap_to_bin_centers(PressSchedule& schedule, double tau_ms) {
  if (!(tau_ms > 0.0))
    throw InvalidInputError("snap_to_bin_centers: tau must be positive");
  double prev = -1.0;
  for (double& press : schedule.press_times_ms) {
    press = (std::floor(press / tau_ms) + 0.5) * tau_ms;
    if (press <= prev) press = prev + tau_ms;  // keep strictly increasing
    prev = press;
  }
}

void write_trace_csv(std::ostream& os, const PressSchedule& schedule,
                     const EventTrace& trace, double tau_ms) {
  os << "device_id,press_index,press_ms,observed_ms,tick\n";
  for (std::size_t d = 0; d < trace.observed_ms.size(); ++d) {
    const auto& row = trace.observed_ms[d];
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << d << ',' << i << ',' << schedule.press_times_ms[i] << ',' << row[i]
         << ',' << quantize(row[i], tau_ms).index << '\n';
    }
  }
}

}  // namespace switchpair
