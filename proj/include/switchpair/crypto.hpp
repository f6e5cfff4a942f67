#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "switchpair/errors.hpp"
#include "switchpair/timebase.hpp"

namespace switchpair {

using Bytes = std::vector<std::uint8_t>;
using Digest32 = std::array<std::uint8_t, 32>;
using DhKey = std::array<std::uint8_t, 32>;

inline constexpr std::size_t kPublicKeySize = 65;  // uncompressed P-256 point
inline constexpr std::size_t kNonceSize = 16;
// Floor on the number of ticks that may enter commitments and key material
// after fault filtering. Keeps the keyspace at least 66^4 at the default
// parameters (tolerance 120 ms, ~8 s press cadence).
inline constexpr std::size_t kMinRetainedTicks = 4;

struct Nonce {
  std::array<std::uint8_t, kNonceSize> bytes{};
  auto operator<=>(const Nonce&) const = default;
};

struct Commitment {
  Digest32 digest{};
  auto operator<=>(const Commitment&) const = default;
};

struct SessionKey {
  std::array<std::uint8_t, 32> bytes{};
  auto operator<=>(const SessionKey&) const = default;
};

// Private scalar bytes, wiped on destruction.
class SecretScalar {
 public:
  SecretScalar() = default;
  explicit SecretScalar(Bytes bytes) : bytes_(std::move(bytes)) {}
  SecretScalar(const SecretScalar&) = default;
  SecretScalar(SecretScalar&&) noexcept = default;
  SecretScalar& operator=(const SecretScalar& other);
  SecretScalar& operator=(SecretScalar&&) noexcept;
  ~SecretScalar() { wipe(); }

  std::span<const std::uint8_t> view() const { return bytes_; }
  bool empty() const { return bytes_.empty(); }

 private:
  void wipe();
  Bytes bytes_;
};

struct KeyPair {
  SecretScalar sk;  // 32-byte big-endian scalar
  Bytes pk;         // 65-byte uncompressed point encoding
};

// Fresh P-256 keypair. A seed makes generation deterministic (tests and
// replayable trials only); without one the scalar comes from the OS CSPRNG.
KeyPair generate_keypair(std::optional<std::uint64_t> seed = std::nullopt);

// 16 random bytes, deterministic when seeded.
Nonce generate_nonce(std::optional<std::uint64_t> seed = std::nullopt);

// ECDH agreement: the x-coordinate of sk * pk. Rejects encodings that are
// not a point on the curve.
DhKey dh(const SecretScalar& sk, std::span<const std::uint8_t> peer_pk);

// True iff the bytes decode to a valid point.
bool valid_public_key(std::span<const std::uint8_t> pk);

Digest32 sha256(std::span<const std::uint8_t> data);

// Raw commitment function F over an ordered public-key list, a nonce and a
// tick sequence. Callers fix the key order; the pairing protocol uses
// descending device id, which for two devices puts the responder key first.
Commitment commitment_digest(std::span<const Bytes> pks_in_order,
                             const Nonce& nonce, std::span<const Tick> ticks);

// Two-device commitment, responder key first then initiator key. Requires a
// full sequence of more than four ticks.
Commitment commitment(const Bytes& pk_r, const Bytes& pk_i, const Nonce& nonce,
                      std::span<const Tick> s);

// Evidence digest H for one press: binds the session salt, the press index
// (0-based) and the tick, so equal ticks at equal positions under the same
// salt compare equal without revealing the tick.
Digest32 evidence_hash(Tick tick, std::uint32_t index,
                       std::span<const std::uint8_t> session_salt);

// Session salt: digest over all session public keys in the protocol's
// canonical order. Salting the evidence prevents offline dictionary attacks
// on the small tick space from sniffed digests.
Digest32 session_salt(std::span<const Bytes> pks_in_order);

// Key derivation P over the DH secret, the retained tick sequence and both
// nonces (responder nonce first). Requires at least kMinRetainedTicks ticks.
SessionKey derive_key(std::span<const std::uint8_t> dhkey,
                      std::span<const Tick> s, const Nonce& r_r,
                      const Nonce& r_i);

}  // namespace switchpair
