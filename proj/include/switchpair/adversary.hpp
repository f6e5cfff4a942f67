#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "switchpair/powerline.hpp"
#include "switchpair/protocol.hpp"

namespace switchpair {

// Parameters of the closed-form guessing bound: the user's per-press cadence
// in seconds, the delay tolerance in milliseconds and the press count.
struct GuessingParams {
  double reaction_s = 8.0;
  double tolerance_ms = 120.0;
  int presses = 4;
};

// Distinguishable tick values per press interval: floor(1000 * T_r / t_com).
// The flooring reproduces the published arithmetic (66 values at 8 s and
// 120 ms, so 66^4 = 18,974,736 sequences for four presses).
std::uint64_t guessing_value_count(const GuessingParams& p);

// Probability that a blind guesser hits the whole tick sequence:
// 1 / guessing_value_count(p)^presses.
double guessing_success_probability(const GuessingParams& p);

// The Passkey Entry comparison point, 1/999,999.
double passkey_baseline();

// Attacker lag between seeing a press and acting: human reaction time plus
// relative device delay. Defaults to a lognormal with median 215 ms.
using ReactionModel = rng::Distribution;
ReactionModel default_reaction_model();

// Simulates watching attackers: each attacker replays every press of the
// victim's observed event row with a sampled lag, and a press counts as a
// match when both land in the same tick bin. Returns per-attacker match
// counts out of n.
std::vector<int> simulate_peeper(std::span<const double> victim_events_ms,
                                 const ReactionModel& model, double tau_ms,
                                 int trials, std::uint64_t seed);

enum class MitmOutcome { DetectedAtCommitment, Succeeded };

// The honest pair the attacker tries to wedge into.
struct MitmSetup {
  PairingConfig config;
  std::vector<DeviceProfile> profiles{DeviceProfile{}, DeviceProfile{}};
  rng::Distribution interval_model =
      rng::Distribution::truncated_normal(8000.0, 500.0);
  bool bin_center = false;
};

// What a watching attacker knows when choosing a tick sequence: the bin of
// each user press and the width of the guessing window. true_ticks is the
// honest device's actual sequence, used only by the cheat-mode strategy to
// show the detector is not vacuous.
struct AttackView {
  std::vector<Tick> press_window_base;
  std::uint64_t window_width = 1;
  std::vector<Tick> true_ticks;
};

using GuessStrategy =
    std::function<std::vector<Tick>(const AttackView&, rng::Stream&)>;

// Uniform guess within each press window, nudged to stay strictly
// increasing.
GuessStrategy uniform_guess_strategy();

// Oracle access to the true ticks; succeeds by construction.
GuessStrategy oracle_cheat_strategy();

// Runs the man-in-the-middle attempt: two full pairing runs, attacker
// against each honest device, with the attacker's own keys and guessed
// ticks. Succeeds only if both runs pass every commitment verification and
// complete; the honest pair never re-runs after that single try.
MitmOutcome mitm_attempt(const MitmSetup& setup, const GuessStrategy& strategy,
                         std::uint64_t seed);

}  // namespace switchpair
