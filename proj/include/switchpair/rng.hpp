#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "switchpair/errors.hpp"

namespace switchpair::rng {

// All randomness in the simulator flows from one root seed, split into
// independent streams keyed by (root, purpose, index). Adding a device or an
// attacker never perturbs the draws of any existing stream.
enum class Purpose : std::uint64_t {
  Schedule = 1,
  DeviceDelay = 2,
  Attacker = 3,
  Keygen = 4,
  Nonce = 5,
  Trial = 6,
  PressFailure = 7,
  SourceOffset = 8,
  Bench = 9,
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t root, Purpose purpose,
                                    std::uint64_t index = 0) {
  return mix64(mix64(mix64(root) ^ static_cast<std::uint64_t>(purpose)) ^
               index);
}

// Counter-based SplitMix64 stream. Distribution sampling is implemented here
// rather than with <random> so replays are byte-identical across standard
// library versions.
class Stream {
 public:
  explicit Stream(std::uint64_t state) : state_(state) {}
  Stream(std::uint64_t root, Purpose purpose, std::uint64_t index = 0)
      : state_(derive_seed(root, purpose, index)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // [0, 1), 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Box-Muller; only the cosine branch is used so one value costs two draws
  // and the stream position never depends on caller history.
  double normal(double mean, double stddev) {
    const double u1 = 1.0 - next_unit();  // (0, 1]
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Normal truncated at zero, by rejection.
  double truncated_normal(double mean, double stddev) {
    for (int i = 0; i < 1000; ++i) {
      const double v = normal(mean, stddev);
      if (v >= 0.0) return v;
    }
    return 0.0;
  }

  // Parameterized by the median (= exp of the underlying normal mean).
  double lognormal_median(double median, double sigma_log) {
    return std::exp(normal(std::log(median), sigma_log));
  }

 private:
  std::uint64_t state_;
};

enum class DistFamily { Constant, Uniform, TruncatedNormal, LogNormal };

// Descriptor for the delay / interval / reaction distributions used across
// the simulator. Parameter meaning by family:
//   Constant        a = value
//   Uniform         [a, b]
//   TruncatedNormal mean a, stddev b, resampled below zero
//   LogNormal       median a, sigma of the underlying normal b
struct Distribution {
  DistFamily family = DistFamily::Constant;
  double a = 0.0;
  double b = 0.0;

  static Distribution constant(double v) {
    return {DistFamily::Constant, v, 0.0};
  }
  static Distribution uniform(double lo, double hi) {
    if (!(lo <= hi)) throw InvalidInputError("uniform: lo must be <= hi");
    return {DistFamily::Uniform, lo, hi};
  }
  static Distribution truncated_normal(double mean, double stddev) {
    if (!(stddev >= 0.0))
      throw InvalidInputError("normal: stddev must be >= 0");
    return {DistFamily::TruncatedNormal, mean, stddev};
  }
  static Distribution lognormal_median(double median, double sigma_log) {
    if (!(median > 0.0) || !(sigma_log >= 0.0))
      throw InvalidInputError("lognormal: median > 0 and sigma >= 0 required");
    return {DistFamily::LogNormal, median, sigma_log};
  }

  double sample(Stream& s) const {
    switch (family) {
      case DistFamily::Constant:
        return a;
      case DistFamily::Uniform:
        return s.uniform(a, b);
      case DistFamily::TruncatedNormal:
        return s.truncated_normal(a, b);
      case DistFamily::LogNormal:
        return s.lognormal_median(a, b);
    }
    throw InvalidInputError("unknown distribution family");
  }

  // Smallest value the distribution can produce; used to validate that delay
  // models cannot go negative.
  double min_value() const {
    switch (family) {
      case DistFamily::Constant:
        return a;
      case DistFamily::Uniform:
        return a;
      case DistFamily::TruncatedNormal:
      case DistFamily::LogNormal:
        return 0.0;
    }
    return 0.0;
  }

  double mean() const {
    switch (family) {
      case DistFamily::Constant:
        return a;
      case DistFamily::Uniform:
        return 0.5 * (a + b);
      case DistFamily::TruncatedNormal:
        return a;  // truncation bias is negligible for the models in use
      case DistFamily::LogNormal:
        return a * std::exp(0.5 * b * b);
    }
    return a;
  }

  // Parses "constant:v", "uniform:lo:hi", "normal:mean:stddev",
  // "lognormal:median:sigma".
  static Distribution parse(const std::string& spec);
  std::string to_string() const;
};

}  // namespace switchpair::rng
