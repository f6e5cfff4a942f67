#include "switchpair/campaign.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <thread>

#include "switchpair/bench.hpp"
#include "switchpair/tolerance.hpp"

namespace switchpair {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms_since(Clock::time_point begin) {
  return std::chrono::duration<double, std::milli>(Clock::now() - begin)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// One output row; elapsed stays in its own trailing column so replay
// comparisons can strip it.
struct Row {
  std::string cells;
  double elapsed_ms = 0.0;
};

void write_rows(std::ostream& os, const std::vector<Row>& rows) {
  for (const Row& r : rows) os << r.cells << ',' << fmt(r.elapsed_ms) << '\n';
}

// Runs `count` jobs over the worker pool; results land in index order so
// output never depends on the thread count.
template <typename Fn>
std::vector<Row> pooled(int count, int threads, Fn&& job) {
  std::vector<Row> rows(static_cast<std::size_t>(count));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) rows[static_cast<std::size_t>(i)] = job(i);
    return rows;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int tid = 0; tid < threads; ++tid) {
    pool.emplace_back([&, tid] {
      for (int i = tid; i < count; i += threads)
        rows[static_cast<std::size_t>(i)] = job(i);
    });
  }
  for (auto& t : pool) t.join();
  return rows;
}

struct Cell {
  double tau;
  int presses;
  int devices;
  double fault;
};

std::string cell_prefix(CampaignKind kind, const Cell& c) {
  return std::string(to_string(kind)) + ',' + fmt(c.tau) + ',' +
         std::to_string(c.presses) + ',' + std::to_string(c.devices) + ',' +
         fmt(c.fault);
}

}  // namespace

CampaignKind parse_campaign(const std::string& name) {
  if (name == "tolsweep") return CampaignKind::TolSweep;
  if (name == "presssweep") return CampaignKind::PressSweep;
  if (name == "multidevice") return CampaignKind::MultiDevice;
  if (name == "faultgrid") return CampaignKind::FaultGrid;
  if (name == "peeper") return CampaignKind::Peeper;
  if (name == "mitm") return CampaignKind::Mitm;
  if (name == "hashbench") return CampaignKind::HashBench;
  throw ConfigError("unknown campaign '" + name + "'");
}

const char* to_string(CampaignKind kind) {
  switch (kind) {
    case CampaignKind::TolSweep: return "tolsweep";
    case CampaignKind::PressSweep: return "presssweep";
    case CampaignKind::MultiDevice: return "multidevice";
    case CampaignKind::FaultGrid: return "faultgrid";
    case CampaignKind::Peeper: return "peeper";
    case CampaignKind::Mitm: return "mitm";
    case CampaignKind::HashBench: return "hashbench";
  }
  return "?";
}

const char* to_string(TrialOutcome outcome) {
  switch (outcome) {
    case TrialOutcome::KeyAgreed: return "KeyAgreed";
    case TrialOutcome::FaultAbort: return "FaultAbort";
    case TrialOutcome::AuthAbort: return "AuthAbort";
    case TrialOutcome::ProtocolError: return "ProtocolError";
  }
  return "?";
}

TrialRun run_honest_trial(const TrialParams& params, std::uint64_t trial_seed,
                          KeyStore* store) {
  params.config.validate();
  const int m = params.config.device_count;
  const double tau = params.config.tau_ms;

  TrialRun run;
  try {
    PressSchedule schedule = sample_press_schedule(
        static_cast<int>(params.config.presses), params.interval, trial_seed);
    if (params.bin_center) snap_to_bin_centers(schedule, tau);

    PressSchedule second_source;
    if (params.split_offset)
      second_source =
          offset_schedule(schedule, *params.split_offset, trial_seed);

    DeviceProfile profile;
    profile.precision.tp_ms = tau;
    profile.delay_model = params.jitter;

    std::vector<std::vector<Tick>> ticks(static_cast<std::size_t>(m));
    for (int d = 0; d < m; ++d) {
      const bool on_second_source = params.split_offset && d >= m / 2;
      const auto observed =
          observe(profile, on_second_source ? second_source : schedule,
                  trial_seed, static_cast<std::uint32_t>(d));
      rng::Stream failures(trial_seed, rng::Purpose::PressFailure,
                           static_cast<std::uint32_t>(d));
      auto& row = ticks[static_cast<std::size_t>(d)];
      for (const double t : observed) {
        Tick tick = quantize(t, tau);
        if (params.press_failure_prob > 0.0 &&
            failures.next_unit() < params.press_failure_prob)
          tick.index += 1;  // reboot glitch lands the press in the next bin
        row.push_back(tick);
      }
    }

    std::vector<PairingSession> sessions;
    sessions.reserve(static_cast<std::size_t>(m));
    std::vector<PairingSession*> handles;
    for (int d = 0; d < m; ++d)
      sessions.emplace_back(d == 0 ? Role::Initiator : Role::Responder,
                            static_cast<std::uint16_t>(d), params.config,
                            trial_seed);
    for (auto& s : sessions) handles.push_back(&s);

    Mesh mesh(handles);
    for (auto& s : sessions) mesh.post(s.start());
    mesh.run();

    const bool all_collecting =
        std::all_of(sessions.begin(), sessions.end(), [](const auto& s) {
          return s.phase() == Phase::Collecting;
        });
    if (all_collecting) {
      for (std::uint32_t i = 0; i < params.config.presses; ++i) {
        for (int d = 0; d < m; ++d) {
          auto& s = sessions[static_cast<std::size_t>(d)];
          if (s.active())
            mesh.post(s.record_event(ticks[static_cast<std::size_t>(d)][i]));
        }
      }
      mesh.run();
    }

    for (const auto& s : sessions)
      if (s.error_rate()) run.epsilon = s.error_rate();

    const bool all_verified =
        std::all_of(sessions.begin(), sessions.end(), [](const auto& s) {
          return s.phase() == Phase::Verified;
        });
    if (all_verified) {
      run.keys.reserve(sessions.size());
      for (auto& s : sessions) run.keys.push_back(s.finalize());
      // Runner invariant: KeyAgreed means every pairwise key matched.
      bool all_match = true;
      for (int a = 0; a < m && all_match; ++a)
        for (int b = a + 1; b < m && all_match; ++b)
          all_match = run.keys[static_cast<std::size_t>(a)].at(
                          static_cast<std::uint16_t>(b)) ==
                      run.keys[static_cast<std::size_t>(b)].at(
                          static_cast<std::uint16_t>(a));
      if (!all_match) {
        run.keys.clear();
        run.outcome = TrialOutcome::ProtocolError;
        return run;
      }
      run.outcome = TrialOutcome::KeyAgreed;
      if (store != nullptr && m == 2) {
        store->put(0, trial_seed, run.keys[0].at(1));
        store->put(1, trial_seed, run.keys[1].at(0));
      }
      return run;
    }

    run.outcome = TrialOutcome::ProtocolError;
    for (const auto& s : sessions) {
      if (s.abort_reason()) {
        switch (*s.abort_reason()) {
          case AbortReason::FaultTolerance:
            run.outcome = TrialOutcome::FaultAbort;
            break;
          case AbortReason::AuthenticationFailure:
            run.outcome = TrialOutcome::AuthAbort;
            break;
          case AbortReason::ProtocolViolation:
            run.outcome = TrialOutcome::ProtocolError;
            break;
        }
        break;
      }
    }
    return run;
  } catch (const Error&) {
    run.outcome = TrialOutcome::ProtocolError;
    return run;
  }
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("campaign: trials must be at least 1");
  if (threads < 1) throw ConfigError("campaign: threads must be at least 1");
  if (tau_list.empty() || press_list.empty() || fault_list.empty() ||
      iters_list.empty())
    throw ConfigError("campaign: parameter lists must be non-empty");
  for (const double t : tau_list)
    if (!(t > 0.0)) throw ConfigError("campaign: tolerances must be positive");
  for (const int n : press_list)
    if (n <= 4 && campaign != CampaignKind::HashBench)
      throw ConfigError("campaign: press counts must exceed 4");
  for (const double f : fault_list)
    if (!(f >= 0.0 && f < 1.0))
      throw ConfigError("campaign: fault tolerances must lie in [0, 1)");
  if (devices < 2) throw ConfigError("campaign: at least two devices");
  if (campaign == CampaignKind::MultiDevice && devices < 3)
    throw ConfigError("campaign: the multi-device campaign needs at least "
                      "three devices");
  if (campaign == CampaignKind::Mitm && devices != 2)
    throw ConfigError("campaign: the mitm campaign is pairwise");
  if (press_failure_prob < 0.0 || press_failure_prob >= 1.0)
    throw ConfigError("campaign: press failure probability outside [0, 1)");
}

namespace {

std::vector<Row> honest_cell(const ExperimentConfig& config, const Cell& cell,
                             std::uint64_t cell_seed) {
  TrialParams params;
  params.config.tau_ms = cell.tau;
  params.config.fault_tolerance = cell.fault;
  params.config.presses = static_cast<std::uint32_t>(cell.presses);
  params.config.device_count = static_cast<std::uint16_t>(cell.devices);
  params.jitter = config.jitter;
  params.interval = config.interval;
  params.bin_center = config.bin_center;
  params.press_failure_prob = config.press_failure_prob;
  params.split_offset = config.split_offset;

  const std::string prefix = cell_prefix(config.campaign, cell);
  int agreed = 0;
  auto rows = pooled(config.trials, config.threads, [&](int t) {
    const auto begin = Clock::now();
    const TrialRun run = run_honest_trial(
        params, rng::derive_seed(cell_seed, rng::Purpose::Trial,
                                 static_cast<std::uint64_t>(t)));
    Row row;
    row.cells = prefix + ',' + std::to_string(t) + ',' +
                to_string(run.outcome) + ',' +
                (run.epsilon ? fmt(*run.epsilon) : std::string()) + ',';
    row.elapsed_ms = elapsed_ms_since(begin);
    return row;
  });
  for (const Row& r : rows)
    if (r.cells.find(",KeyAgreed,") != std::string::npos) ++agreed;

  Row summary;
  summary.cells =
      prefix + ",summary,," + ',' +
      fmt(static_cast<double>(agreed) / static_cast<double>(config.trials));
  double total = 0.0;
  for (const Row& r : rows) total += r.elapsed_ms;
  summary.elapsed_ms = total;
  rows.push_back(std::move(summary));
  return rows;
}

std::vector<Row> peeper_cell(const ExperimentConfig& config, const Cell& cell,
                             std::uint64_t cell_seed) {
  // One victim run per cell, many watching attackers.
  PressSchedule schedule =
      sample_press_schedule(cell.presses, config.interval, cell_seed);
  if (config.bin_center) snap_to_bin_centers(schedule, cell.tau);
  DeviceProfile profile;
  profile.precision.tp_ms = cell.tau;
  profile.delay_model = config.jitter;
  const auto victim = observe(profile, schedule, cell_seed, 0);

  const auto begin = Clock::now();
  const auto matches = simulate_peeper(victim, config.reaction, cell.tau,
                                       config.trials, cell_seed);
  const double elapsed = elapsed_ms_since(begin);
  const double per_trial =
      elapsed / static_cast<double>(std::max(config.trials, 1));

  const std::string prefix = cell_prefix(config.campaign, cell);
  std::vector<Row> rows;
  rows.reserve(matches.size() + 1);
  int full = 0;
  for (std::size_t t = 0; t < matches.size(); ++t) {
    const bool all = matches[t] == cell.presses;
    if (all) ++full;
    Row row;
    row.cells = prefix + ',' + std::to_string(t) + ',' +
                std::to_string(matches[t]) + ',' + (all ? "1" : "0") + ',';
    row.elapsed_ms = per_trial;
    rows.push_back(std::move(row));
  }
  Row summary;
  summary.cells =
      prefix + ",summary,,," +
      fmt(static_cast<double>(full) / static_cast<double>(config.trials));
  summary.elapsed_ms = elapsed;
  rows.push_back(std::move(summary));
  return rows;
}

std::vector<Row> mitm_cell(const ExperimentConfig& config, const Cell& cell,
                           std::uint64_t cell_seed) {
  MitmSetup setup;
  setup.config.tau_ms = cell.tau;
  setup.config.fault_tolerance = cell.fault;
  setup.config.presses = static_cast<std::uint32_t>(cell.presses);
  setup.config.device_count = 2;
  setup.profiles.assign(2, DeviceProfile{DevicePrecision{cell.tau},
                                         config.jitter, 0.0});
  setup.interval_model = config.interval;
  setup.bin_center = config.bin_center;

  const std::string prefix = cell_prefix(config.campaign, cell);
  const GuessStrategy strategy = uniform_guess_strategy();
  int succeeded = 0;
  auto rows = pooled(config.trials, config.threads, [&](int t) {
    const auto begin = Clock::now();
    const MitmOutcome outcome = mitm_attempt(
        setup, strategy,
        rng::derive_seed(cell_seed, rng::Purpose::Trial,
                         static_cast<std::uint64_t>(t)));
    Row row;
    row.cells = prefix + ',' + std::to_string(t) + ',' +
                (outcome == MitmOutcome::Succeeded ? "Succeeded"
                                                   : "DetectedAtCommitment") +
                ',';
    row.elapsed_ms = elapsed_ms_since(begin);
    return row;
  });
  for (const Row& r : rows)
    if (r.cells.find(",Succeeded,") != std::string::npos) ++succeeded;

  Row summary;
  summary.cells =
      prefix + ",summary,," +
      fmt(static_cast<double>(succeeded) / static_cast<double>(config.trials));
  double total = 0.0;
  for (const Row& r : rows) total += r.elapsed_ms;
  summary.elapsed_ms = total;
  rows.push_back(std::move(summary));
  return rows;
}

std::vector<Row> hashbench_rows(const ExperimentConfig& config) {
  std::vector<Row> rows;
  for (const HashAlgo algo : {HashAlgo::Md5, HashAlgo::Sha256}) {
    for (const int k : config.press_list) {
      for (const int iters : config.iters_list) {
        Row row;
        row.cells = std::string(to_string(config.campaign)) + ',' +
                    to_string(algo) + ',' + std::to_string(k) + ',' +
                    std::to_string(iters);
        row.elapsed_ms = benchmark_hash(algo, k, iters, config.seed);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace

void run_campaign(const ExperimentConfig& config, std::ostream& os) {
  config.validate();

  if (config.campaign == CampaignKind::HashBench) {
    os << "campaign,algorithm,k,iterations,elapsed_ms\n";
    write_rows(os, hashbench_rows(config));
    return;
  }

  // Cell axes per campaign; unswept parameters take the first list entry.
  std::vector<Cell> cells;
  const Cell base{config.tau_list.front(), config.press_list.front(),
                  config.devices, config.fault_list.front()};
  switch (config.campaign) {
    case CampaignKind::TolSweep:
    case CampaignKind::MultiDevice:
      for (const double tau : config.tau_list) {
        Cell c = base;
        c.tau = tau;
        cells.push_back(c);
      }
      break;
    case CampaignKind::PressSweep:
      for (const int n : config.press_list) {
        Cell c = base;
        c.presses = n;
        cells.push_back(c);
      }
      break;
    case CampaignKind::FaultGrid:
      for (const double tau : config.tau_list) {
        for (const double fault : config.fault_list) {
          Cell c = base;
          c.tau = tau;
          c.fault = fault;
          cells.push_back(c);
        }
      }
      break;
    case CampaignKind::Peeper:
    case CampaignKind::Mitm:
      cells.push_back(base);
      break;
    case CampaignKind::HashBench:
      break;
  }

  if (config.campaign == CampaignKind::Peeper) {
    os << "campaign,tau_ms,presses,devices,fault,trial,matches,all_match,"
          "success_rate,elapsed_ms\n";
  } else if (config.campaign == CampaignKind::Mitm) {
    os << "campaign,tau_ms,presses,devices,fault,trial,outcome,success_rate,"
          "elapsed_ms\n";
  } else {
    os << "campaign,tau_ms,presses,devices,fault,trial,outcome,epsilon,"
          "success_rate,elapsed_ms\n";
  }

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const std::uint64_t cell_seed =
        rng::derive_seed(config.seed, rng::Purpose::Trial, ci);
    std::vector<Row> rows;
    if (config.campaign == CampaignKind::Peeper) {
      rows = peeper_cell(config, cells[ci], cell_seed);
    } else if (config.campaign == CampaignKind::Mitm) {
      rows = mitm_cell(config, cells[ci], cell_seed);
    } else {
      rows = honest_cell(config, cells[ci], cell_seed);
    }
    write_rows(os, rows);
  }
}

}  // namespace switchpair
