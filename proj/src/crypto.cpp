#include "switchpair/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/crypto.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/obj_mac.h>
#include <openssl/rand.h>

#include <cstring>
#include <memory>

#include "switchpair/rng.hpp"

namespace switchpair {

namespace {

// Domain separation tags. F, H and P are all SHA-256 but never share an
// input space.
constexpr char kTagCommit[] = "SPF1";
constexpr char kTagEvidence[] = "SPH1";
constexpr char kTagKdf[] = "SPP1";
constexpr char kTagSalt[] = "SPS1";

struct BnDeleter {
  void operator()(BIGNUM* p) const { BN_free(p); }
};
struct BnCtxDeleter {
  void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
struct PointDeleter {
  void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;
using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxDeleter>;
using PointPtr = std::unique_ptr<EC_POINT, PointDeleter>;

const EC_GROUP* p256_group() {
  static EC_GROUP* group = [] {
    EC_GROUP* g = EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1);
    if (g == nullptr) throw Error("could not initialize the P-256 group");
    return g;
  }();
  return group;
}

const BIGNUM* p256_order() {
  static BIGNUM* order = [] {
    BnCtxPtr ctx(BN_CTX_new());
    BIGNUM* n = BN_new();
    if (n == nullptr || EC_GROUP_get_order(p256_group(), n, ctx.get()) != 1)
      throw Error("could not read the P-256 group order");
    return n;
  }();
  return order;
}

Bytes encode_point(const EC_POINT* point) {
  BnCtxPtr ctx(BN_CTX_new());
  Bytes out(kPublicKeySize);
  const std::size_t len =
      EC_POINT_point2oct(p256_group(), point, POINT_CONVERSION_UNCOMPRESSED,
                         out.data(), out.size(), ctx.get());
  if (len != kPublicKeySize) throw Error("point encoding failed");
  return out;
}

PointPtr decode_point(std::span<const std::uint8_t> pk) {
  PointPtr point(EC_POINT_new(p256_group()));
  if (point == nullptr) throw Error("point allocation failed");
  BnCtxPtr ctx(BN_CTX_new());
  if (pk.size() != kPublicKeySize ||
      EC_POINT_oct2point(p256_group(), point.get(), pk.data(), pk.size(),
                         ctx.get()) != 1 ||
      EC_POINT_is_at_infinity(p256_group(), point.get()) == 1)
    throw InvalidPointError("public key does not decode to a curve point");
  return point;
}

void append_be32(Bytes& buf, std::uint32_t v) {
  buf.push_back(static_cast<std::uint8_t>(v >> 24));
  buf.push_back(static_cast<std::uint8_t>(v >> 16));
  buf.push_back(static_cast<std::uint8_t>(v >> 8));
  buf.push_back(static_cast<std::uint8_t>(v));
}

void append_be64(Bytes& buf, std::uint64_t v) {
  append_be32(buf, static_cast<std::uint32_t>(v >> 32));
  append_be32(buf, static_cast<std::uint32_t>(v));
}

// Canonical serialization: every field is prefixed with its 4-byte
// big-endian length; tick sequences are one field of 8-byte big-endian
// integers.
void append_field(Bytes& buf, std::span<const std::uint8_t> data) {
  append_be32(buf, static_cast<std::uint32_t>(data.size()));
  buf.insert(buf.end(), data.begin(), data.end());
}

void append_tick_field(Bytes& buf, std::span<const Tick> ticks) {
  append_be32(buf, static_cast<std::uint32_t>(ticks.size() * 8));
  for (const Tick t : ticks) append_be64(buf, t.index);
}

void append_tag(Bytes& buf, const char* tag) {
  buf.insert(buf.end(), tag, tag + 4);
}

Digest32 digest_of(const Bytes& buf) { return sha256(buf); }

}  // namespace

SecretScalar& SecretScalar::operator=(const SecretScalar& other) {
  if (this != &other) {
    wipe();
    bytes_ = other.bytes_;
  }
  return *this;
}

SecretScalar& SecretScalar::operator=(SecretScalar&& other) noexcept {
  if (this != &other) {
    wipe();
    bytes_ = std::move(other.bytes_);
  }
  return *this;
}

void SecretScalar::wipe() {
  if (!bytes_.empty()) OPENSSL_cleanse(bytes_.data(), bytes_.size());
}

Digest32 sha256(std::span<const std::uint8_t> data) {
  Digest32 out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != out.size())
    throw Error("SHA-256 failed");
  return out;
}

KeyPair generate_keypair(std::optional<std::uint64_t> seed) {
  std::optional<rng::Stream> stream;
  if (seed) stream.emplace(*seed, rng::Purpose::Keygen);

  Bytes scalar(32);
  BnPtr d;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    if (stream) {
      for (std::size_t i = 0; i < 4; ++i) {
        const std::uint64_t w = stream->next_u64();
        for (std::size_t j = 0; j < 8; ++j)
          scalar[i * 8 + j] = static_cast<std::uint8_t>(w >> (56 - 8 * j));
      }
    } else if (RAND_bytes(scalar.data(), static_cast<int>(scalar.size())) !=
               1) {
      throw Error("system randomness unavailable");
    }
    d.reset(BN_bin2bn(scalar.data(), static_cast<int>(scalar.size()), nullptr));
    if (d == nullptr) throw Error("scalar decode failed");
    if (!BN_is_zero(d.get()) && BN_cmp(d.get(), p256_order()) < 0) break;
    d.reset();
  }
  if (d == nullptr) throw Error("could not sample a valid private scalar");

  BnCtxPtr ctx(BN_CTX_new());
  PointPtr pub(EC_POINT_new(p256_group()));
  if (pub == nullptr ||
      EC_POINT_mul(p256_group(), pub.get(), d.get(), nullptr, nullptr,
                   ctx.get()) != 1)
    throw Error("public key derivation failed");

  KeyPair kp;
  kp.sk = SecretScalar(std::move(scalar));
  kp.pk = encode_point(pub.get());
  return kp;
}

Nonce generate_nonce(std::optional<std::uint64_t> seed) {
  Nonce n;
  if (seed) {
    rng::Stream stream(*seed, rng::Purpose::Nonce);
    for (std::size_t i = 0; i < 2; ++i) {
      const std::uint64_t w = stream.next_u64();
      for (std::size_t j = 0; j < 8; ++j)
        n.bytes[i * 8 + j] = static_cast<std::uint8_t>(w >> (56 - 8 * j));
    }
  } else if (RAND_bytes(n.bytes.data(), static_cast<int>(n.bytes.size())) !=
             1) {
    throw Error("system randomness unavailable");
  }
  return n;
}

bool valid_public_key(std::span<const std::uint8_t> pk) {
  try {
    decode_point(pk);
    return true;
  } catch (const InvalidPointError&) {
    return false;
  }
}

DhKey dh(const SecretScalar& sk, std::span<const std::uint8_t> peer_pk) {
  if (sk.empty()) throw InvalidInputError("dh: empty private scalar");
  const PointPtr peer = decode_point(peer_pk);

  const auto sk_bytes = sk.view();
  BnPtr d(BN_bin2bn(sk_bytes.data(), static_cast<int>(sk_bytes.size()),
                    nullptr));
  if (d == nullptr) throw Error("scalar decode failed");

  BnCtxPtr ctx(BN_CTX_new());
  PointPtr shared(EC_POINT_new(p256_group()));
  if (shared == nullptr ||
      EC_POINT_mul(p256_group(), shared.get(), nullptr, peer.get(), d.get(),
                   ctx.get()) != 1)
    throw Error("ECDH scalar multiplication failed");
  if (EC_POINT_is_at_infinity(p256_group(), shared.get()) == 1)
    throw InvalidPointError("ECDH produced the point at infinity");

  BnPtr x(BN_new());
  if (x == nullptr ||
      EC_POINT_get_affine_coordinates(p256_group(), shared.get(), x.get(),
                                      nullptr, ctx.get()) != 1)
    throw Error("ECDH coordinate extraction failed");

  DhKey out{};
  if (BN_bn2binpad(x.get(), out.data(), static_cast<int>(out.size())) !=
      static_cast<int>(out.size()))
    throw Error("ECDH encoding failed");
  BN_clear(x.get());
  return out;
}

Commitment commitment_digest(std::span<const Bytes> pks_in_order,
                             const Nonce& nonce, std::span<const Tick> ticks) {
  if (pks_in_order.empty())
    throw InvalidInputError("commitment: at least one public key required");
  if (ticks.empty())
    throw InvalidInputError("commitment: empty tick sequence");
  Bytes buf;
  append_tag(buf, kTagCommit);
  for (const Bytes& pk : pks_in_order) append_field(buf, pk);
  append_field(buf, nonce.bytes);
  append_tick_field(buf, ticks);
  return Commitment{digest_of(buf)};
}

Commitment commitment(const Bytes& pk_r, const Bytes& pk_i, const Nonce& nonce,
                      std::span<const Tick> s) {
  if (s.size() <= 4)
    throw PreconditionError(
        "commitment: the full timestamp sequence must have more than four "
        "entries");
  const Bytes pks[] = {pk_r, pk_i};
  return commitment_digest(pks, nonce, s);
}

Digest32 evidence_hash(Tick tick, std::uint32_t index,
                       std::span<const std::uint8_t> session_salt) {
  Bytes buf;
  append_tag(buf, kTagEvidence);
  append_field(buf, session_salt);
  append_be32(buf, 4);
  append_be32(buf, index);
  append_be32(buf, 8);
  append_be64(buf, tick.index);
  return digest_of(buf);
}

Digest32 session_salt(std::span<const Bytes> pks_in_order) {
  Bytes buf;
  append_tag(buf, kTagSalt);
  for (const Bytes& pk : pks_in_order) append_field(buf, pk);
  return digest_of(buf);
}

SessionKey derive_key(std::span<const std::uint8_t> dhkey,
                      std::span<const Tick> s, const Nonce& r_r,
                      const Nonce& r_i) {
  if (dhkey.empty()) throw InvalidInputError("derive_key: empty DH secret");
  if (s.size() < kMinRetainedTicks)
    throw InsufficientEntropyError(
        "derive_key: fewer than four retained timestamps");
  Bytes buf;
  append_tag(buf, kTagKdf);
  append_field(buf, dhkey);
  append_tick_field(buf, s);
  append_field(buf, r_r.bytes);
  append_field(buf, r_i.bytes);
  SessionKey key;
  key.bytes = digest_of(buf);
  OPENSSL_cleanse(buf.data(), buf.size());
  return key;
}

}  // namespace switchpair
