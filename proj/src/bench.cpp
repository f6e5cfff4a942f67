#include "switchpair/bench.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <vector>

#include "switchpair/errors.hpp"
#include "switchpair/rng.hpp"

namespace switchpair {

HashAlgo parse_hash_algo(const std::string& name) {
  if (name == "md5") return HashAlgo::Md5;
  if (name == "sha256") return HashAlgo::Sha256;
  throw ConfigError("unknown hash algorithm '" + name +
                    "' (expected md5 or sha256)");
}

const char* to_string(HashAlgo algo) {
  return algo == HashAlgo::Md5 ? "md5" : "sha256";
}

double benchmark_hash(HashAlgo algo, int timestamp_count, int iterations,
                      std::uint64_t seed) {
  if (timestamp_count < 1 || iterations < 1)
    throw InvalidInputError("benchmark_hash: counts must be at least 1");

  rng::Stream stream(seed, rng::Purpose::Bench);
  std::vector<std::uint8_t> input(
      static_cast<std::size_t>(timestamp_count) * 8);
  for (int i = 0; i < timestamp_count; ++i) {
    const std::uint64_t tick = stream.next_u64();
    for (int j = 0; j < 8; ++j)
      input[static_cast<std::size_t>(i) * 8 + static_cast<std::size_t>(j)] =
          static_cast<std::uint8_t>(tick >> (56 - 8 * j));
  }

  const EVP_MD* md = algo == HashAlgo::Md5 ? EVP_md5() : EVP_sha256();
  if (md == nullptr) throw Error("hash algorithm unavailable");

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  // Feed the previous digest's first byte back into the input so the loop
  // cannot be collapsed by the optimizer.
  volatile std::uint8_t sink = 0;

  const auto begin = std::chrono::steady_clock::now();
  for (int i = 0; i < iterations; ++i) {
    input[0] ^= sink;
    if (EVP_Digest(input.data(), input.size(), digest, &len, md, nullptr) != 1)
      throw Error("hash benchmark failed");
    sink = digest[0];
  }
  const auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(end - begin).count();
}

}  // namespace switchpair
