#pragma once

#include <cstdint>
#include <string>

namespace switchpair {

// MD5 exists here, and only here, as the published overhead comparison
// point; the pairing path is SHA-256 throughout.
enum class HashAlgo { Md5, Sha256 };

HashAlgo parse_hash_algo(const std::string& name);
const char* to_string(HashAlgo algo);

// Hashes a serialized sequence of `timestamp_count` random ticks
// `iterations` times and returns the wall time in milliseconds.
double benchmark_hash(HashAlgo algo, int timestamp_count, int iterations,
                      std::uint64_t seed = 1);

}  // namespace switchpair
