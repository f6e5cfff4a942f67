#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "switchpair/adversary.hpp"
#include "switchpair/keystore.hpp"
#include "switchpair/powerline.hpp"
#include "switchpair/protocol.hpp"

namespace switchpair {

enum class CampaignKind {
  TolSweep,
  PressSweep,
  MultiDevice,
  FaultGrid,
  Peeper,
  Mitm,
  HashBench,
};

CampaignKind parse_campaign(const std::string& name);
const char* to_string(CampaignKind kind);

enum class TrialOutcome { KeyAgreed, FaultAbort, AuthAbort, ProtocolError };
const char* to_string(TrialOutcome outcome);

// Everything one honest pairing trial needs besides its seed.
struct TrialParams {
  PairingConfig config;
  rng::Distribution jitter = rng::Distribution::uniform(0.0, 30.0);
  rng::Distribution interval =
      rng::Distribution::truncated_normal(8000.0, 500.0);
  bool bin_center = false;
  // Chance that a device garbles one press (reboot glitch model); lets the
  // press-count sweep demonstrate failure classes the hardware showed.
  double press_failure_prob = 0.0;
  // When set, the second half of the devices sits on a separate power
  // source actuated with this inter-hand offset per press.
  std::optional<rng::Distribution> split_offset;
};

struct TrialRun {
  TrialOutcome outcome = TrialOutcome::ProtocolError;
  std::optional<double> epsilon;
  // Per device, per peer; filled only on KeyAgreed.
  std::vector<std::map<std::uint16_t, SessionKey>> keys;
};

// Builds the trace, drives the full protocol mesh and classifies the result.
// KeyAgreed implies every pairwise key matched; the runner asserts it. When
// a store is given (two-device runs), both devices persist their key under
// the trial seed as the session id.
TrialRun run_honest_trial(const TrialParams& params, std::uint64_t trial_seed,
                          KeyStore* store = nullptr);

struct ExperimentConfig {
  CampaignKind campaign = CampaignKind::TolSweep;
  int trials = 1000;
  std::vector<double> tau_list{120.0};
  std::vector<int> press_list{5};
  int devices = 2;
  std::vector<double> fault_list{0.0};
  rng::Distribution jitter = rng::Distribution::uniform(0.0, 30.0);
  rng::Distribution interval =
      rng::Distribution::truncated_normal(8000.0, 500.0);
  bool bin_center = false;
  double press_failure_prob = 0.0;
  std::optional<rng::Distribution> split_offset;
  rng::Distribution reaction = default_reaction_model();
  std::vector<int> iters_list{500, 1000, 1500, 2000, 2500};
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;  // throws ConfigError
};

// Runs every cell of the campaign and writes one CSV row per trial plus a
// summary row per cell. Output is byte-identical across re-runs and thread
// counts except for the trailing elapsed_ms column.
void run_campaign(const ExperimentConfig& config, std::ostream& os);

}  // namespace switchpair
