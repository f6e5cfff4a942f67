#pragma once

#include <cstdint>
#include <filesystem>

#include "switchpair/crypto.hpp"

namespace switchpair {

// File-backed persistent key storage, one record per (device, session).
// Records are length-prefixed and checksummed, append-only with
// last-write-wins on read, so corruption is detectable the way flash
// integrity checks would surface it.
class KeyStore {
 public:
  explicit KeyStore(std::filesystem::path path) : path_(std::move(path)) {}

  void put(std::uint16_t device_id, std::uint64_t session_id,
           const SessionKey& key);

  // Throws NotFoundError when no record exists and IntegrityError when the
  // store is truncated or a checksum fails.
  SessionKey get(std::uint16_t device_id, std::uint64_t session_id) const;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace switchpair
