// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_FINGERPRINTS_H_
#define MOLAL_FINGERPRINTS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "molal/error.h"
#include "molal/molecule.h"

namespace molal {

enum class MetricsErrc {
  kKindMismatch,
  kBadArgument,
};

using MetricsError = CodedError<MetricsErrc>;

// Bumped whenever feature hashing changes.
inline constexpr int kFingerprintVersion = 1;

struct FingerprintKind {
  enum Type { kCircular, kPath };
  Type type = kCircular;
  int parameter = 2;  // radius for circular, maximum bond count for path

  std::string to_string() const;  // "circular(2)", "path(7)"

  friend bool operator==(const FingerprintKind &, const FingerprintKind &) = default;
};

// Sorted set of 32-bit feature ids.
class Fingerprint {
 public:
  Fingerprint() = default;
  Fingerprint(FingerprintKind kind, std::vector<std::uint32_t> ids);

  const FingerprintKind &kind() const { return kind_; }
  const std::vector<std::uint32_t> &ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool contains(std::uint32_t id) const;

  friend bool operator==(const Fingerprint &, const Fingerprint &) = default;

 private:
  FingerprintKind kind_;
  std::vector<std::uint32_t> ids_;
};

// Low 32 bits of FNV-1a 64 over the little-endian bytes of the words.
std::uint32_t feature_hash(std::span<const std::uint64_t> words);

// Morgan-style neighbourhood hashing. Round 0 ids hash (element, charge,
// degree, hydrogen count, ring flag); every later round hashes the atom's
// previous id with its sorted (bond order, neighbour id) pairs. Ids from
// all rounds are kept.
Fingerprint circular_fingerprint(const Molecule &mol, int radius = 2);

// Every simple path of 0..maxlen bonds, each undirected path once, as atom
// index sequences. A length-l path has l + 1 atoms.
std::vector<std::vector<int>> enumerate_paths(const Molecule &mol, int maxlen);

// Hashes each enumerated path with an orientation-independent encoding of
// its atoms (element, aromatic flag) and bond orders.
Fingerprint path_fingerprint(const Molecule &mol, int maxlen = 7);

Fingerprint fingerprint(const Molecule &mol, FingerprintKind kind);

// |A n B| / |A u B|, 1.0 when both are empty. Throws kKindMismatch.
double tanimoto(const Fingerprint &a, const Fingerprint &b);

}  // namespace molal

#endif  // MOLAL_FINGERPRINTS_H_
