#include "switchpair/keystore.hpp"

#include <zlib.h>

#include <fstream>
#include <vector>

namespace switchpair {

namespace {

// Record layout: u32 length (bytes after this field), u16 device id,
// u64 session id, 32 key bytes, u32 CRC-32 over device id..key.
constexpr std::uint32_t kRecordBody = 2 + 8 + 32 + 4;

void put_be(std::vector<std::uint8_t>& buf, std::uint64_t v, int bytes) {
  for (int i = bytes - 1; i >= 0; --i)
    buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_be(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v = (v << 8) | p[i];
  return v;
}

std::uint32_t checksum(const std::uint8_t* data, std::size_t len) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(len)));
}

}  // namespace

void KeyStore::put(std::uint16_t device_id, std::uint64_t session_id,
                   const SessionKey& key) {
  std::vector<std::uint8_t> record;
  record.reserve(4 + kRecordBody);
  put_be(record, kRecordBody, 4);
  put_be(record, device_id, 2);
  put_be(record, session_id, 8);
  record.insert(record.end(), key.bytes.begin(), key.bytes.end());
  const std::uint32_t crc = checksum(record.data() + 4, kRecordBody - 4);
  put_be(record, crc, 4);

  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw IoError("key store: cannot open " + path_.string());
  out.write(reinterpret_cast<const char*>(record.data()),
            static_cast<std::streamsize>(record.size()));
  out.flush();
  if (!out) throw IoError("key store: write failed for " + path_.string());
}

SessionKey KeyStore::get(std::uint16_t device_id,
                         std::uint64_t session_id) const {
  std::ifstream in(path_, std::ios::binary);
  if (!in)
    throw NotFoundError("key store: no record for the requested device and "
                        "session");
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());

  bool found = false;
  SessionKey key;
  std::size_t pos = 0;
  while (pos < data.size()) {
    if (pos + 4 > data.size())
      throw IntegrityError("key store: truncated record length");
    const auto len = static_cast<std::uint32_t>(get_be(&data[pos], 4));
    pos += 4;
    if (len != kRecordBody || pos + len > data.size())
      throw IntegrityError("key store: truncated or malformed record");
    const std::uint8_t* body = &data[pos];
    const std::uint32_t stored_crc =
        static_cast<std::uint32_t>(get_be(body + kRecordBody - 4, 4));
    if (stored_crc != checksum(body, kRecordBody - 4))
      throw IntegrityError("key store: record checksum mismatch");
    const auto rec_device = static_cast<std::uint16_t>(get_be(body, 2));
    const std::uint64_t rec_session = get_be(body + 2, 8);
    if (rec_device == device_id && rec_session == session_id) {
      std::copy_n(body + 10, key.bytes.size(), key.bytes.begin());
      found = true;  // keep scanning: last write wins
    }
    pos += len;
  }
  if (!found)
    throw NotFoundError("key store: no record for the requested device and "
                        "session");
  return key;
}

}  // namespace switchpair
