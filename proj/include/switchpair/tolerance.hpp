#pragma once

#include <span>
#include <vector>

#include "switchpair/crypto.hpp"

namespace switchpair {

// Per-press evidence digests, exchanged so devices can locate mismatching
// presses without revealing the timestamps themselves.
struct EvidenceVector {
  std::vector<Digest32> digests;
};

// One row per device, all rows the same length.
using EvidenceMatrix = std::vector<EvidenceVector>;

struct MultiErrorRate {
  double epsilon = 0.0;
  bool rank1 = false;  // every column identical across all rows
};

// Element i is evidence_hash(s[i], i, salt); indices are 0-based.
EvidenceVector evidence_vector(std::span<const Tick> s,
                               std::span<const std::uint8_t> session_salt);

// Fraction of positions where the two vectors disagree. The comparison is an
// inequality indicator per position, which is what the hash-difference sum in
// the two-device error rate reduces to.
double error_rate(const EvidenceVector& a, const EvidenceVector& b);

// Multi-device (three or more rows) error rate: a column counts as an error
// if any two rows disagree there. rank1 is true iff no column has any
// disagreement, the combinatorial reading of the rank-1 condition.
MultiErrorRate multi_error_rate(std::span<const EvidenceVector> rows);

// Positions (0-based, ascending) where every vector agrees.
std::vector<std::size_t> agreed_indices(
    std::span<const EvidenceVector> vectors);

// Accept iff the error rate is strictly below the fault tolerance, except
// that a perfect run is always accepted; otherwise zero fault tolerance
// would reject error-free pairings.
bool accept(double error_rate, double fault_tolerance);

}  // namespace switchpair
