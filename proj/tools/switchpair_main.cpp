#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "switchpair/adversary.hpp"
#include "switchpair/bench.hpp"
#include "switchpair/campaign.hpp"
#include "switchpair/keystore.hpp"

namespace {

using namespace switchpair;

std::string with_thousands(std::uint64_t v) {
  const std::string plain = std::to_string(v);
  std::string out;
  out.reserve(plain.size() + plain.size() / 3);
  const std::size_t first = plain.size() % 3 == 0 ? 3 : plain.size() % 3;
  for (std::size_t i = 0; i < plain.size(); ++i) {
    if (i != 0 && (i - first) % 3 == 0 && i >= first) out.push_back(',');
    out.push_back(plain[i]);
  }
  return out;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (const std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

SessionKey key_from_hex(const std::string& hex) {
  SessionKey key;
  if (hex.size() != key.bytes.size() * 2)
    throw ConfigError("key must be 64 hex characters");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ConfigError("key contains a non-hex character");
  };
  for (std::size_t i = 0; i < key.bytes.size(); ++i)
    key.bytes[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) |
                                             nibble(hex[2 * i + 1]));
  return key;
}

void print_guess_analysis(double reaction_s, double tau_ms, int n) {
  const GuessingParams params{reaction_s, tau_ms, n};
  const std::uint64_t values = guessing_value_count(params);
  const double p = guessing_success_probability(params);

  std::cout << "values per press: " << values << "\n";
  const double bits = static_cast<double>(n) *
                      std::log2(static_cast<double>(values));
  if (bits <= 63.0) {
    std::uint64_t denom = 1;
    for (int i = 0; i < n; ++i) denom *= values;
    std::cout << "guessing success probability: 1/" << with_thousands(denom)
              << " = " << sci(p) << "\n";
  } else {
    std::cout << "guessing success probability: " << sci(p) << "\n";
  }
  std::cout << "passkey entry baseline: 1/999,999 = " << sci(passkey_baseline())
            << "\n";
  std::cout << "stronger than passkey entry: "
            << (p < passkey_baseline() ? "yes" : "no") << "\n";
}

struct RunFlags {
  std::string campaign = "tolsweep";
  ExperimentConfig config;
  std::string jitter_spec = "uniform:0:30";
  std::string interval_spec = "normal:8000:500";
  std::string reaction_spec = "lognormal:215:0.25";
  std::string split_offset_spec;
  std::string out_path;
};

int do_run(const RunFlags& flags) {
  ExperimentConfig config = flags.config;
  config.campaign = parse_campaign(flags.campaign);
  config.jitter = rng::Distribution::parse(flags.jitter_spec);
  config.interval = rng::Distribution::parse(flags.interval_spec);
  config.reaction = rng::Distribution::parse(flags.reaction_spec);
  if (!flags.split_offset_spec.empty())
    config.split_offset = rng::Distribution::parse(flags.split_offset_spec);
  config.validate();

  if (flags.out_path.empty()) {
    run_campaign(config, std::cout);
    return 0;
  }
  std::ofstream out(flags.out_path);
  if (!out)
    throw IoError("cannot open output path '" + flags.out_path + "'");
  run_campaign(config, out);
  out.flush();
  if (!out) throw IoError("write failed for '" + flags.out_path + "'");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SwitchPairing pairing simulator and experiment harness"};
  app.require_subcommand(1);

  // run
  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run an experiment campaign");
  run->set_config("--config", "", "campaign config file (flags override it)");
  run->add_option("--campaign", run_flags.campaign,
                  "tolsweep|presssweep|multidevice|faultgrid|peeper|mitm|"
                  "hashbench")
      ->required();
  run->add_option("--tau", run_flags.config.tau_list,
                  "delay tolerance list, ms")
      ->delimiter(',');
  run->add_option("--presses", run_flags.config.press_list,
                  "switch press count list")
      ->delimiter(',');
  run->add_option("--devices", run_flags.config.devices, "device count");
  run->add_option("--fault", run_flags.config.fault_list,
                  "fault tolerance list, fractions in [0,1)")
      ->delimiter(',');
  run->add_option("--jitter", run_flags.jitter_spec,
                  "device delay model, e.g. uniform:0:30");
  run->add_option("--interval", run_flags.interval_spec,
                  "press interval model, e.g. normal:8000:500");
  run->add_flag("--bin-center", run_flags.config.bin_center,
                "snap presses to tick bin centers");
  run->add_option("--press-failure", run_flags.config.press_failure_prob,
                  "per-press device glitch probability");
  run->add_option("--split-offset", run_flags.split_offset_spec,
                  "second power source inter-hand offset model, e.g. "
                  "normal:0:150");
  run->add_option("--reaction", run_flags.reaction_spec,
                  "peeper lag model, e.g. lognormal:215:0.25");
  run->add_option("--iters", run_flags.config.iters_list,
                  "hash benchmark iteration list")
      ->delimiter(',');
  run->add_option("--trials", run_flags.config.trials, "trials per cell");
  run->add_option("--seed", run_flags.config.seed, "root seed");
  run->add_option("--threads", run_flags.config.threads, "worker threads");
  run->add_option("--out", run_flags.out_path, "output CSV path");

  // bench
  std::string bench_algo = "sha256";
  int bench_k = 4;
  int bench_iters = 500;
  std::uint64_t bench_seed = 1;
  std::string bench_out;
  CLI::App* bench = app.add_subcommand("bench", "hash overhead benchmark");
  bench->add_option("--algo", bench_algo, "md5|sha256")->required();
  bench->add_option("--k", bench_k, "timestamps per hash input");
  bench->add_option("--iters", bench_iters, "iterations");
  bench->add_option("--seed", bench_seed, "tick seed");
  bench->add_option("--out", bench_out, "output CSV path");

  // keystore
  std::string store_path;
  std::uint16_t store_device = 0;
  std::uint64_t store_session = 0;
  std::string store_key_hex;
  CLI::App* keystore = app.add_subcommand("keystore", "persistent key store");
  keystore->require_subcommand(1);
  CLI::App* ks_put = keystore->add_subcommand("put", "store a session key");
  ks_put->add_option("--store", store_path, "store file")->required();
  ks_put->add_option("--device", store_device, "device id")->required();
  ks_put->add_option("--session", store_session, "session id")->required();
  ks_put->add_option("--key", store_key_hex, "64 hex chars")->required();
  CLI::App* ks_get = keystore->add_subcommand("get", "load a session key");
  ks_get->add_option("--store", store_path, "store file")->required();
  ks_get->add_option("--device", store_device, "device id")->required();
  ks_get->add_option("--session", store_session, "session id")->required();

  // analyze
  double an_reaction = 8.0;
  double an_tau = 120.0;
  int an_n = 4;
  CLI::App* analyze = app.add_subcommand("analyze", "closed-form analysis");
  analyze->require_subcommand(1);
  CLI::App* guess =
      analyze->add_subcommand("guess", "guessing attack success bound");
  guess->add_option("--reaction", an_reaction, "press cadence, seconds");
  guess->add_option("--tau", an_tau, "delay tolerance, ms");
  guess->add_option("--n", an_n, "press count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return do_run(run_flags);

    if (bench->parsed()) {
      const HashAlgo algo = parse_hash_algo(bench_algo);
      const double ms = benchmark_hash(algo, bench_k, bench_iters, bench_seed);
      const std::string row = std::string(to_string(algo)) + "," +
                              std::to_string(bench_k) + "," +
                              std::to_string(bench_iters) + "," +
                              std::to_string(ms);
      if (bench_out.empty()) {
        std::cout << "algorithm,k,iterations,elapsed_ms\n" << row << "\n";
      } else {
        std::ofstream out(bench_out);
        if (!out) throw IoError("cannot open '" + bench_out + "'");
        out << "algorithm,k,iterations,elapsed_ms\n" << row << "\n";
      }
      return 0;
    }

    if (ks_put->parsed()) {
      KeyStore store((std::filesystem::path(store_path)));
      store.put(store_device, store_session, key_from_hex(store_key_hex));
      return 0;
    }
    if (ks_get->parsed()) {
      KeyStore store((std::filesystem::path(store_path)));
      const SessionKey key = store.get(store_device, store_session);
      std::cout << to_hex(key.bytes) << "\n";
      return 0;
    }

    if (guess->parsed()) {
      if (an_reaction <= 0.0 || an_tau <= 0.0 || an_n < 1)
        throw ConfigError("analyze guess: parameters must be positive");
      print_guess_analysis(an_reaction, an_tau, an_n);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NotFoundError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IntegrityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
