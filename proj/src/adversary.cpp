#include "switchpair/adversary.hpp"

#include <cmath>

namespace switchpair {

namespace {

void check_params(const GuessingParams& p) {
  if (!(p.reaction_s > 0.0) || !std::isfinite(p.reaction_s) ||
      !(p.tolerance_ms > 0.0) || !std::isfinite(p.tolerance_ms) ||
      p.presses < 1)
    throw InvalidInputError("guessing params: all values must be positive");
}

}  // namespace

std::uint64_t guessing_value_count(const GuessingParams& p) {
  check_params(p);
  const double values = std::floor(1000.0 * p.reaction_s / p.tolerance_ms);
  if (values < 1.0) return 1;  // less than one value per press: free guess
  return static_cast<std::uint64_t>(values);
}

double guessing_success_probability(const GuessingParams& p) {
  const std::uint64_t count = guessing_value_count(p);
  // Exact while count^n fits the double mantissa, so the exponent law holds
  // bit-for-bit in tests; falls back to pow for huge keyspaces.
  const double bits = static_cast<double>(p.presses) *
                      std::log2(static_cast<double>(count));
  if (bits <= 52.0) {
    double denom = 1.0;
    for (int i = 0; i < p.presses; ++i)
      denom *= static_cast<double>(count);
    return 1.0 / denom;
  }
  return std::pow(static_cast<double>(count), -static_cast<double>(p.presses));
}

double passkey_baseline() { return 1.0 / 999999.0; }

ReactionModel default_reaction_model() {
  return rng::Distribution::lognormal_median(215.0, 0.25);
}

std::vector<int> simulate_peeper(std::span<const double> victim_events_ms,
                                 const ReactionModel& model, double tau_ms,
                                 int trials, std::uint64_t seed) {
  if (trials < 1)
    throw InvalidInputError("simulate_peeper: at least one trial required");
  if (victim_events_ms.empty())
    throw InvalidInputError("simulate_peeper: empty victim trace");

  std::vector<Tick> victim_ticks;
  victim_ticks.reserve(victim_events_ms.size());
  for (const double t : victim_events_ms)
    victim_ticks.push_back(quantize(t, tau_ms));

  std::vector<int> matches(static_cast<std::size_t>(trials), 0);
  for (int trial = 0; trial < trials; ++trial) {
    rng::Stream stream(seed, rng::Purpose::Attacker,
                       static_cast<std::uint64_t>(trial));
    int hit = 0;
    for (std::size_t i = 0; i < victim_events_ms.size(); ++i) {
      const double lag = std::max(model.sample(stream), 0.0);
      if (quantize(victim_events_ms[i] + lag, tau_ms) == victim_ticks[i])
        ++hit;
    }
    matches[static_cast<std::size_t>(trial)] = hit;
  }
  return matches;
}

GuessStrategy uniform_guess_strategy() {
  return [](const AttackView& view, rng::Stream& stream) {
    std::vector<Tick> guess;
    guess.reserve(view.press_window_base.size());
    std::uint64_t prev = 0;
    bool first = true;
    for (const Tick base : view.press_window_base) {
      std::uint64_t g = base.index + stream.next_u64() % view.window_width;
      if (!first && g <= prev) g = prev + 1;
      guess.push_back(Tick{g});
      prev = g;
      first = false;
    }
    return guess;
  };
}

GuessStrategy oracle_cheat_strategy() {
  return [](const AttackView& view, rng::Stream&) { return view.true_ticks; };
}

MitmOutcome mitm_attempt(const MitmSetup& setup, const GuessStrategy& strategy,
                         std::uint64_t seed) {
  setup.config.validate();
  if (setup.profiles.size() != 2)
    throw InvalidInputError("mitm_attempt: exactly two honest devices");
  if (setup.config.device_count != 2)
    throw InvalidInputError("mitm_attempt: pairwise configuration required");

  PressSchedule schedule = sample_press_schedule(
      static_cast<int>(setup.config.presses), setup.interval_model, seed);
  if (setup.bin_center) snap_to_bin_centers(schedule, setup.config.tau_ms);
  const EventTrace trace = run_trace(setup.profiles, schedule, seed);

  AttackView view;
  view.window_width = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(
             std::floor(setup.interval_model.mean() / setup.config.tau_ms)));
  for (const double press : schedule.press_times_ms)
    view.press_window_base.push_back(quantize(press, setup.config.tau_ms));

  // Run r = 0: honest initiator vs. attacker-as-responder.
  // Run r = 1: attacker-as-initiator vs. honest responder.
  for (int r = 0; r < 2; ++r) {
    const auto& honest_row =
        trace.observed_ms[static_cast<std::size_t>(r)];
    std::vector<Tick> honest_ticks;
    for (const double t : honest_row)
      honest_ticks.push_back(quantize(t, setup.config.tau_ms));

    view.true_ticks = honest_ticks;
    rng::Stream guess_stream(seed, rng::Purpose::Attacker,
                             static_cast<std::uint64_t>(r));
    const std::vector<Tick> guess = strategy(view, guess_stream);
    if (guess.size() != honest_ticks.size())
      throw InvalidInputError("mitm_attempt: strategy returned a sequence of "
                              "the wrong length");

    const std::uint64_t run_seed =
        rng::derive_seed(seed, rng::Purpose::Trial, static_cast<unsigned>(r));
    const std::uint16_t honest_id = r == 0 ? 0 : 1;
    const std::uint16_t attacker_id = r == 0 ? 1 : 0;
    PairingSession honest(honest_id == 0 ? Role::Initiator : Role::Responder,
                          honest_id, setup.config, run_seed);
    PairingSession attacker(
        attacker_id == 0 ? Role::Initiator : Role::Responder, attacker_id,
        setup.config, rng::derive_seed(run_seed, rng::Purpose::Attacker));

    Mesh mesh({honest_id == 0 ? &honest : &attacker,
               honest_id == 0 ? &attacker : &honest});
    mesh.post(honest.start());
    mesh.post(attacker.start());
    mesh.run();
    if (honest.phase() != Phase::Collecting ||
        attacker.phase() != Phase::Collecting)
      return MitmOutcome::DetectedAtCommitment;

    try {
      for (std::size_t i = 0; i < honest_ticks.size(); ++i) {
        mesh.post(honest.record_event(honest_ticks[i]));
        mesh.post(attacker.record_event(guess[i]));
      }
      mesh.run();
      if (honest.phase() != Phase::Verified ||
          attacker.phase() != Phase::Verified)
        return MitmOutcome::DetectedAtCommitment;
      const auto honest_keys = honest.finalize();
      const auto attacker_keys = attacker.finalize();
      if (honest_keys.at(attacker_id) != attacker_keys.at(honest_id))
        return MitmOutcome::DetectedAtCommitment;
    } catch (const Error&) {
      return MitmOutcome::DetectedAtCommitment;
    }
  }
  return MitmOutcome::Succeeded;
}

}  // namespace switchpair
