#include "switchpair/tolerance.hpp"

namespace switchpair {

EvidenceVector evidence_vector(std::span<const Tick> s,
                               std::span<const std::uint8_t> session_salt) {
  EvidenceVector v;
  v.digests.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    v.digests.push_back(
        evidence_hash(s[i], static_cast<std::uint32_t>(i), session_salt));
  return v;
}

double error_rate(const EvidenceVector& a, const EvidenceVector& b) {
  if (a.digests.size() != b.digests.size() || a.digests.empty())
    throw InvalidInputError("error_rate: vectors must be non-empty and of "
                            "equal length");
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < a.digests.size(); ++i)
    if (a.digests[i] != b.digests[i]) ++mismatches;
  return static_cast<double>(mismatches) /
         static_cast<double>(a.digests.size());
}

MultiErrorRate multi_error_rate(std::span<const EvidenceVector> rows) {
  if (rows.size() <= 2)
    throw InvalidInputError(
        "multi_error_rate: more than two devices required");
  const std::size_t n = rows.front().digests.size();
  if (n == 0) throw InvalidInputError("multi_error_rate: empty rows");
  for (const auto& row : rows)
    if (row.digests.size() != n)
      throw InvalidInputError("multi_error_rate: ragged matrix");

  std::size_t bad_columns = 0;
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r].digests[col] != rows[0].digests[col]) {
        ++bad_columns;
        break;
      }
    }
  }
  MultiErrorRate out;
  out.epsilon = static_cast<double>(bad_columns) / static_cast<double>(n);
  out.rank1 = bad_columns == 0;
  return out;
}

std::vector<std::size_t> agreed_indices(
    std::span<const EvidenceVector> vectors) {
  if (vectors.empty())
    throw InvalidInputError("agreed_indices: no vectors supplied");
  const std::size_t n = vectors.front().digests.size();
  for (const auto& v : vectors)
    if (v.digests.size() != n)
      throw InvalidInputError("agreed_indices: vectors of unequal length");

  std::vector<std::size_t> agreed;
  for (std::size_t col = 0; col < n; ++col) {
    bool all_equal = true;
    for (std::size_t r = 1; r < vectors.size() && all_equal; ++r)
      all_equal = vectors[r].digests[col] == vectors[0].digests[col];
    if (all_equal) agreed.push_back(col);
  }
  return agreed;
}

bool accept(double error_rate, double fault_tolerance) {
  if (!(error_rate >= 0.0 && error_rate <= 1.0))
    throw InvalidInputError("accept: error rate outside [0, 1]");
  if (!(fault_tolerance >= 0.0 && fault_tolerance < 1.0))
    throw InvalidInputError("accept: fault tolerance outside [0, 1)");
  return error_rate == 0.0 || error_rate < fault_tolerance;
}

}  // namespace switchpair
