#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "switchpair/crypto.hpp"
#include "switchpair/timebase.hpp"
#include "switchpair/tolerance.hpp"

namespace switchpair {

enum class Role { Initiator, Responder };

// Phases form a strict total order; a session never skips or revisits one.
// Aborted can be entered from any active phase.
enum class Phase {
  Setup,
  Features,
  Keys,
  Synced,
  Collecting,
  Exchanged,
  Verified,
  Complete,
  Aborted,
};

enum class AbortReason : std::uint8_t {
  ProtocolViolation = 1,
  FaultTolerance = 2,
  AuthenticationFailure = 3,
};

enum class MsgKind : std::uint8_t {
  FeatureExchange = 1,
  PublicKey = 2,
  SyncEpoch = 3,
  NonceReveal = 4,
  Evidence = 5,
  Commitment = 6,
  Confirm = 7,
  Abort = 8,
};

struct PairingConfig {
  double tau_ms = 120.0;
  double fault_tolerance = 0.0;  // fraction of presses allowed to mismatch
  std::uint32_t presses = 5;     // must exceed 4
  std::uint16_t device_count = 2;

  void validate() const;  // throws ConfigError
};

struct Message {
  MsgKind kind{};
  std::uint16_t sender = 0;
  Bytes payload;
};

// Wire format: 1 byte kind, 2 bytes sender (big-endian), 4 bytes payload
// length (big-endian), payload.
Bytes encode(const Message& msg);
Message decode(std::span<const std::uint8_t> wire);

const char* to_string(Phase phase);
const char* to_string(MsgKind kind);
const char* to_string(AbortReason reason);

// One device's pairing state machine. Devices are numbered 0..m-1 within a
// session group; device 0 is the initiator and drives the epoch sync.
//
// Flow: both sides broadcast their feature block and public key, the
// initiator announces the epoch once all keys are in, every device then
// records its quantized power-loss ticks and broadcasts its nonce and
// evidence vector. Once all evidence is in, each device drops the press
// indices whose digests disagree, checks the error rate against the fault
// tolerance, and commits to the surviving ticks. Commitments are verified
// cross-device before any key is derived; a mismatch aborts the session for
// good — a session object can never be restarted.
class PairingSession {
 public:
  PairingSession(Role role, std::uint16_t device_id, PairingConfig config,
                 std::uint64_t seed);

  // Setup -> Features; emits the FeatureExchange and PublicKey broadcasts.
  std::vector<Message> start();

  std::vector<Message> handle_message(const Message& msg);

  // Feeds one quantized power-loss event; ticks must be strictly
  // increasing. After the configured number of presses the session
  // broadcasts NonceReveal and Evidence and moves to Exchanged.
  std::vector<Message> record_event(Tick tick);

  // Verified -> Complete; derives one key per peer over the agreed ticks.
  std::map<std::uint16_t, SessionKey> finalize();

  Phase phase() const { return phase_; }
  bool active() const {
    return phase_ != Phase::Complete && phase_ != Phase::Aborted;
  }
  std::optional<AbortReason> abort_reason() const { return abort_reason_; }
  const std::string& abort_detail() const { return abort_detail_; }
  std::uint16_t device_id() const { return id_; }
  Role role() const { return role_; }
  const Bytes& public_key() const { return keypair_.pk; }
  const Nonce& nonce() const { return nonce_; }
  const std::vector<Tick>& recorded() const { return recorded_; }
  const std::vector<std::size_t>& agreed() const { return agreed_; }
  // Session error rate, available once all evidence has been compared.
  std::optional<double> error_rate() const { return epsilon_; }
  std::uint64_t epoch_ms() const { return epoch_ms_; }
  const std::vector<Phase>& phase_history() const { return history_; }
  const std::set<std::uint16_t>& confirmed_peers() const { return confirms_; }

 private:
  std::vector<Message> abort(AbortReason reason, const char* detail);
  void advance(Phase next);
  std::vector<Message> after_public_keys();
  std::vector<Message> try_exchange_steps();
  std::vector<std::uint16_t> peer_ids() const;
  std::vector<Bytes> canonical_pks() const;  // descending device id
  std::vector<Tick> agreed_ticks() const;
  Message broadcast(MsgKind kind, Bytes payload) const;

  Role role_;
  std::uint16_t id_;
  PairingConfig config_;
  KeyPair keypair_;
  Nonce nonce_;
  Phase phase_ = Phase::Setup;
  std::vector<Phase> history_{Phase::Setup};
  std::optional<AbortReason> abort_reason_;
  std::string abort_detail_;

  std::uint64_t epoch_ms_ = 0;
  std::set<std::uint16_t> features_in_;
  std::map<std::uint16_t, Bytes> peer_pks_;
  std::map<std::uint16_t, Nonce> peer_nonces_;
  std::map<std::uint16_t, EvidenceVector> evidence_in_;
  std::map<std::uint16_t, Commitment> commitments_in_;
  std::set<std::uint16_t> confirms_;

  std::vector<Tick> recorded_;
  EvidenceVector own_evidence_;
  std::vector<std::size_t> agreed_;
  std::optional<double> epsilon_;
  bool commitment_sent_ = false;
};

// Convenience form mirroring the construction contract: builds a session and
// starts it.
std::pair<PairingSession, std::vector<Message>> start_session(
    Role role, std::uint16_t device_id, const PairingConfig& config,
    std::uint64_t seed);

// Deterministic broadcast bus: messages are delivered strictly in the order
// they were posted, fanned out to recipients in ascending device id. Replies
// join the back of the queue, so a full mesh settles reproducibly.
class Mesh {
 public:
  explicit Mesh(std::vector<PairingSession*> sessions);

  void post(std::vector<Message> msgs);
  void run();  // deliver until quiescent
  std::size_t delivered() const { return delivered_; }

 private:
  std::vector<PairingSession*> sessions_;
  std::deque<Message> queue_;
  std::size_t delivered_ = 0;
};

}  // namespace switchpair
