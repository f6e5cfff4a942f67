#include "switchpair/protocol.hpp"

#include <openssl/crypto.h>

#include <algorithm>
#include <bit>
#include <cmath>

#include "switchpair/rng.hpp"

namespace switchpair {

namespace {

constexpr std::uint8_t kProtocolVersion = 1;
constexpr std::size_t kHeaderSize = 7;  // kind + sender + payload length
constexpr std::size_t kFeaturePayloadSize = 23;

void put_be16(Bytes& buf, std::uint16_t v) {
  buf.push_back(static_cast<std::uint8_t>(v >> 8));
  buf.push_back(static_cast<std::uint8_t>(v));
}

void put_be32(Bytes& buf, std::uint32_t v) {
  put_be16(buf, static_cast<std::uint16_t>(v >> 16));
  put_be16(buf, static_cast<std::uint16_t>(v));
}

void put_be64(Bytes& buf, std::uint64_t v) {
  put_be32(buf, static_cast<std::uint32_t>(v >> 32));
  put_be32(buf, static_cast<std::uint32_t>(v));
}

std::uint16_t get_be16(std::span<const std::uint8_t> b) {
  return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
}

std::uint32_t get_be32(std::span<const std::uint8_t> b) {
  return (static_cast<std::uint32_t>(b[0]) << 24) |
         (static_cast<std::uint32_t>(b[1]) << 16) |
         (static_cast<std::uint32_t>(b[2]) << 8) |
         static_cast<std::uint32_t>(b[3]);
}

std::uint64_t get_be64(std::span<const std::uint8_t> b) {
  return (static_cast<std::uint64_t>(get_be32(b)) << 32) |
         get_be32(b.subspan(4));
}

}  // namespace

void PairingConfig::validate() const {
  if (!std::isfinite(tau_ms) || tau_ms <= 0.0)
    throw ConfigError("pairing config: delay tolerance must be positive");
  if (!(fault_tolerance >= 0.0 && fault_tolerance < 1.0))
    throw ConfigError("pairing config: fault tolerance must lie in [0, 1)");
  if (presses <= 4)
    throw ConfigError("pairing config: more than four presses required");
  if (device_count < 2)
    throw ConfigError("pairing config: at least two devices required");
}

Bytes encode(const Message& msg) {
  Bytes wire;
  wire.reserve(kHeaderSize + msg.payload.size());
  wire.push_back(static_cast<std::uint8_t>(msg.kind));
  put_be16(wire, msg.sender);
  put_be32(wire, static_cast<std::uint32_t>(msg.payload.size()));
  wire.insert(wire.end(), msg.payload.begin(), msg.payload.end());
  return wire;
}

Message decode(std::span<const std::uint8_t> wire) {
  if (wire.size() < kHeaderSize)
    throw InvalidInputError("message decode: truncated header");
  const std::uint8_t kind = wire[0];
  if (kind < static_cast<std::uint8_t>(MsgKind::FeatureExchange) ||
      kind > static_cast<std::uint8_t>(MsgKind::Abort))
    throw InvalidInputError("message decode: unknown kind");
  Message msg;
  msg.kind = static_cast<MsgKind>(kind);
  msg.sender = get_be16(wire.subspan(1));
  const std::uint32_t len = get_be32(wire.subspan(3));
  if (wire.size() != kHeaderSize + len)
    throw InvalidInputError("message decode: payload length mismatch");
  msg.payload.assign(wire.begin() + kHeaderSize, wire.end());
  return msg;
}

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Setup: return "Setup";
    case Phase::Features: return "Features";
    case Phase::Keys: return "Keys";
    case Phase::Synced: return "Synced";
    case Phase::Collecting: return "Collecting";
    case Phase::Exchanged: return "Exchanged";
    case Phase::Verified: return "Verified";
    case Phase::Complete: return "Complete";
    case Phase::Aborted: return "Aborted";
  }
  return "?";
}

const char* to_string(MsgKind kind) {
  switch (kind) {
    case MsgKind::FeatureExchange: return "FeatureExchange";
    case MsgKind::PublicKey: return "PublicKey";
    case MsgKind::SyncEpoch: return "SyncEpoch";
    case MsgKind::NonceReveal: return "NonceReveal";
    case MsgKind::Evidence: return "Evidence";
    case MsgKind::Commitment: return "Commitment";
    case MsgKind::Confirm: return "Confirm";
    case MsgKind::Abort: return "Abort";
  }
  return "?";
}

const char* to_string(AbortReason reason) {
  switch (reason) {
    case AbortReason::ProtocolViolation: return "protocol-violation";
    case AbortReason::FaultTolerance: return "fault-tolerance";
    case AbortReason::AuthenticationFailure: return "authentication-failure";
  }
  return "?";
}

PairingSession::PairingSession(Role role, std::uint16_t device_id,
                               PairingConfig config, std::uint64_t seed)
    : role_(role), id_(device_id), config_(config) {
  config_.validate();
  if (id_ >= config_.device_count)
    throw ConfigError("session: device id outside the configured group");
  if ((role_ == Role::Initiator) != (id_ == 0))
    throw ConfigError("session: device 0 is the initiator");
  keypair_ = generate_keypair(rng::derive_seed(seed, rng::Purpose::Keygen, id_));
  nonce_ = generate_nonce(rng::derive_seed(seed, rng::Purpose::Nonce, id_));
}

Message PairingSession::broadcast(MsgKind kind, Bytes payload) const {
  return Message{kind, id_, std::move(payload)};
}

void PairingSession::advance(Phase next) {
  if (static_cast<int>(next) != static_cast<int>(phase_) + 1)
    throw ProtocolError("internal: phase transition out of order");
  phase_ = next;
  history_.push_back(next);
}

std::vector<Message> PairingSession::abort(AbortReason reason,
                                           const char* detail) {
  phase_ = Phase::Aborted;
  history_.push_back(Phase::Aborted);
  abort_reason_ = reason;
  abort_detail_ = detail;
  return {broadcast(MsgKind::Abort,
                    Bytes{static_cast<std::uint8_t>(reason)})};
}

std::vector<std::uint16_t> PairingSession::peer_ids() const {
  std::vector<std::uint16_t> ids;
  for (std::uint16_t d = 0; d < config_.device_count; ++d)
    if (d != id_) ids.push_back(d);
  return ids;
}

std::vector<Bytes> PairingSession::canonical_pks() const {
  // Descending device id; for two devices this is responder key first, then
  // initiator key.
  std::vector<Bytes> pks;
  for (int d = config_.device_count - 1; d >= 0; --d) {
    const auto did = static_cast<std::uint16_t>(d);
    if (did == id_) {
      pks.push_back(keypair_.pk);
    } else {
      pks.push_back(peer_pks_.at(did));
    }
  }
  return pks;
}

std::vector<Tick> PairingSession::agreed_ticks() const {
  std::vector<Tick> ticks;
  ticks.reserve(agreed_.size());
  for (const std::size_t i : agreed_) ticks.push_back(recorded_[i]);
  return ticks;
}

std::vector<Message> PairingSession::start() {
  if (phase_ != Phase::Setup)
    throw ProtocolError("session already started");
  advance(Phase::Features);

  Bytes features;
  features.push_back(kProtocolVersion);
  put_be64(features, std::bit_cast<std::uint64_t>(config_.tau_ms));
  put_be64(features, std::bit_cast<std::uint64_t>(config_.fault_tolerance));
  put_be32(features, config_.presses);
  put_be16(features, config_.device_count);

  std::vector<Message> out;
  out.push_back(broadcast(MsgKind::FeatureExchange, std::move(features)));
  out.push_back(broadcast(MsgKind::PublicKey, keypair_.pk));
  return out;
}

std::vector<Message> PairingSession::after_public_keys() {
  if (phase_ != Phase::Keys ||
      peer_pks_.size() != static_cast<std::size_t>(config_.device_count - 1))
    return {};
  advance(Phase::Synced);
  if (role_ == Role::Responder) return {};  // waits for the epoch broadcast

  Bytes epoch;
  put_be64(epoch, epoch_ms_);
  std::vector<Message> out;
  out.push_back(broadcast(MsgKind::SyncEpoch, std::move(epoch)));
  advance(Phase::Collecting);
  return out;
}

std::vector<Message> PairingSession::try_exchange_steps() {
  if (phase_ != Phase::Exchanged) return {};
  const std::size_t peers = config_.device_count - 1u;
  std::vector<Message> out;

  if (!commitment_sent_ && peer_nonces_.size() == peers &&
      evidence_in_.size() == peers) {
    // Rows ordered by device id so every device sees the same matrix.
    EvidenceMatrix rows;
    for (std::uint16_t d = 0; d < config_.device_count; ++d)
      rows.push_back(d == id_ ? own_evidence_ : evidence_in_.at(d));

    double eps = 0.0;
    if (config_.device_count == 2) {
      eps = error_rate(rows[0], rows[1]);
    } else {
      eps = multi_error_rate(rows).epsilon;
    }
    epsilon_ = eps;
    agreed_ = agreed_indices(rows);

    if (!accept(eps, config_.fault_tolerance))
      return abort(AbortReason::FaultTolerance,
                   "error rate not below the fault tolerance");
    if (agreed_.size() < kMinRetainedTicks)
      return abort(AbortReason::FaultTolerance,
                   "fewer than four agreed timestamps remain");

    commitment_sent_ = true;
    const Commitment own =
        commitment_digest(canonical_pks(), nonce_, agreed_ticks());
    out.push_back(broadcast(MsgKind::Commitment,
                            Bytes(own.digest.begin(), own.digest.end())));
  }

  if (commitment_sent_ && commitments_in_.size() == peers) {
    // Agreed ticks equal the peer's by evidence-hash equality, so the
    // peer's commitment must reproduce from its nonce and our ticks.
    const auto pks = canonical_pks();
    const auto ticks = agreed_ticks();
    for (const auto& [pid, received] : commitments_in_) {
      const Commitment expected =
          commitment_digest(pks, peer_nonces_.at(pid), ticks);
      if (expected != received) {
        auto aborted = abort(AbortReason::AuthenticationFailure,
                             "peer commitment verification failed");
        out.insert(out.end(), aborted.begin(), aborted.end());
        return out;
      }
    }
    advance(Phase::Verified);
    out.push_back(broadcast(MsgKind::Confirm, {}));
  }
  return out;
}

std::vector<Message> PairingSession::handle_message(const Message& msg) {
  if (!active())
    throw ProtocolError("session is complete or aborted");
  if (msg.sender == id_ || msg.sender >= config_.device_count)
    return abort(AbortReason::ProtocolViolation,
                 "message from an invalid sender");

  const std::size_t peers = config_.device_count - 1u;
  switch (msg.kind) {
    case MsgKind::FeatureExchange: {
      if (phase_ != Phase::Features)
        return abort(AbortReason::ProtocolViolation,
                     "feature block out of order");
      if (features_in_.contains(msg.sender))
        return abort(AbortReason::ProtocolViolation,
                     "duplicate feature block");
      if (msg.payload.size() != kFeaturePayloadSize ||
          msg.payload[0] != kProtocolVersion)
        return abort(AbortReason::ProtocolViolation,
                     "unsupported pairing feature block");
      const std::span<const std::uint8_t> p(msg.payload);
      const bool config_matches =
          get_be64(p.subspan(1)) ==
              std::bit_cast<std::uint64_t>(config_.tau_ms) &&
          get_be64(p.subspan(9)) ==
              std::bit_cast<std::uint64_t>(config_.fault_tolerance) &&
          get_be32(p.subspan(17)) == config_.presses &&
          get_be16(p.subspan(21)) == config_.device_count;
      if (!config_matches)
        return abort(AbortReason::ProtocolViolation,
                     "pairing configuration mismatch");
      features_in_.insert(msg.sender);
      if (features_in_.size() == peers) {
        advance(Phase::Keys);
        return after_public_keys();
      }
      return {};
    }

    case MsgKind::PublicKey: {
      if (phase_ != Phase::Features && phase_ != Phase::Keys)
        return abort(AbortReason::ProtocolViolation,
                     "public key out of order");
      if (peer_pks_.contains(msg.sender))
        return abort(AbortReason::ProtocolViolation, "duplicate public key");
      if (msg.payload.size() != kPublicKeySize ||
          !valid_public_key(msg.payload))
        return abort(AbortReason::ProtocolViolation,
                     "peer public key is not a valid curve point");
      peer_pks_[msg.sender] = msg.payload;
      return after_public_keys();
    }

    case MsgKind::SyncEpoch: {
      if (role_ != Role::Responder || msg.sender != 0)
        return abort(AbortReason::ProtocolViolation,
                     "epoch sync from a non-initiator");
      if (phase_ != Phase::Synced || msg.payload.size() != 8)
        return abort(AbortReason::ProtocolViolation,
                     "epoch sync out of order");
      epoch_ms_ = get_be64(msg.payload);
      advance(Phase::Collecting);
      return {};
    }

    case MsgKind::NonceReveal: {
      if (phase_ != Phase::Collecting && phase_ != Phase::Exchanged)
        return abort(AbortReason::ProtocolViolation, "nonce out of order");
      if (peer_nonces_.contains(msg.sender))
        return abort(AbortReason::ProtocolViolation, "duplicate nonce");
      if (msg.payload.size() != kNonceSize)
        return abort(AbortReason::ProtocolViolation, "malformed nonce");
      Nonce n;
      std::copy(msg.payload.begin(), msg.payload.end(), n.bytes.begin());
      peer_nonces_[msg.sender] = n;
      return try_exchange_steps();
    }

    case MsgKind::Evidence: {
      if (phase_ != Phase::Collecting && phase_ != Phase::Exchanged)
        return abort(AbortReason::ProtocolViolation, "evidence out of order");
      if (evidence_in_.contains(msg.sender))
        return abort(AbortReason::ProtocolViolation, "duplicate evidence");
      if (msg.payload.size() != config_.presses * 32u)
        return abort(AbortReason::ProtocolViolation, "malformed evidence");
      EvidenceVector v;
      v.digests.resize(config_.presses);
      for (std::uint32_t i = 0; i < config_.presses; ++i)
        std::copy_n(msg.payload.begin() + i * 32, 32, v.digests[i].begin());
      evidence_in_[msg.sender] = std::move(v);
      return try_exchange_steps();
    }

    case MsgKind::Commitment: {
      if (phase_ != Phase::Exchanged)
        return abort(AbortReason::ProtocolViolation,
                     "commitment out of order");
      if (commitments_in_.contains(msg.sender))
        return abort(AbortReason::ProtocolViolation, "duplicate commitment");
      if (msg.payload.size() != 32)
        return abort(AbortReason::ProtocolViolation, "malformed commitment");
      Commitment c;
      std::copy(msg.payload.begin(), msg.payload.end(), c.digest.begin());
      commitments_in_[msg.sender] = c;
      return try_exchange_steps();
    }

    case MsgKind::Confirm: {
      if (phase_ != Phase::Exchanged && phase_ != Phase::Verified)
        return abort(AbortReason::ProtocolViolation, "confirm out of order");
      confirms_.insert(msg.sender);
      return {};
    }

    case MsgKind::Abort: {
      AbortReason reason = AbortReason::ProtocolViolation;
      if (msg.payload.size() == 1 && msg.payload[0] >= 1 &&
          msg.payload[0] <= 3)
        reason = static_cast<AbortReason>(msg.payload[0]);
      phase_ = Phase::Aborted;
      history_.push_back(Phase::Aborted);
      abort_reason_ = reason;
      abort_detail_ = "peer aborted";
      return {};
    }
  }
  return abort(AbortReason::ProtocolViolation, "unknown message kind");
}

std::vector<Message> PairingSession::record_event(Tick tick) {
  if (!active())
    throw ProtocolError("session is complete or aborted");
  if (phase_ != Phase::Collecting)
    return abort(AbortReason::ProtocolViolation,
                 "power event outside the collection phase");
  if (!recorded_.empty() && tick <= recorded_.back())
    throw InvalidInputError("record_event: ticks must be strictly increasing");

  recorded_.push_back(tick);
  if (recorded_.size() < config_.presses) return {};

  advance(Phase::Exchanged);
  const Digest32 salt = session_salt(canonical_pks());
  own_evidence_ = evidence_vector(recorded_, salt);

  std::vector<Message> out;
  out.push_back(broadcast(MsgKind::NonceReveal,
                          Bytes(nonce_.bytes.begin(), nonce_.bytes.end())));
  Bytes evidence;
  evidence.reserve(own_evidence_.digests.size() * 32);
  for (const Digest32& d : own_evidence_.digests)
    evidence.insert(evidence.end(), d.begin(), d.end());
  out.push_back(broadcast(MsgKind::Evidence, std::move(evidence)));

  auto more = try_exchange_steps();
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

std::map<std::uint16_t, SessionKey> PairingSession::finalize() {
  if (phase_ != Phase::Verified)
    throw ProtocolError("finalize requires a verified session");

  std::map<std::uint16_t, SessionKey> keys;
  const auto ticks = agreed_ticks();
  for (const auto& [pid, pk] : peer_pks_) {
    DhKey shared = dh(keypair_.sk, pk);
    // Per pair, the higher device id plays the responder; its nonce comes
    // first in the derivation.
    const Nonce& r_r = pid > id_ ? peer_nonces_.at(pid) : nonce_;
    const Nonce& r_i = pid > id_ ? nonce_ : peer_nonces_.at(pid);
    keys.emplace(pid, derive_key(shared, ticks, r_r, r_i));
    OPENSSL_cleanse(shared.data(), shared.size());
  }
  advance(Phase::Complete);
  return keys;
}

std::pair<PairingSession, std::vector<Message>> start_session(
    Role role, std::uint16_t device_id, const PairingConfig& config,
    std::uint64_t seed) {
  PairingSession session(role, device_id, config, seed);
  auto msgs = session.start();
  return {std::move(session), std::move(msgs)};
}

Mesh::Mesh(std::vector<PairingSession*> sessions)
    : sessions_(std::move(sessions)) {}

void Mesh::post(std::vector<Message> msgs) {
  for (auto& m : msgs) queue_.push_back(std::move(m));
}

void Mesh::run() {
  while (!queue_.empty()) {
    const Message msg = std::move(queue_.front());
    queue_.pop_front();
    for (PairingSession* session : sessions_) {
      if (session->device_id() == msg.sender || !session->active()) continue;
      post(session->handle_message(msg));
      ++delivered_;
    }
  }
}

}  // namespace switchpair
