// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_SMILES_H_
#define MOLAL_SMILES_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "molal/error.h"
#include "molal/molecule.h"

namespace molal {

enum class SmilesErrc {
  kEmpty,
  kSyntax,
  kUnbalancedRing,
  kUnbalancedParen,
  kUnknownAtom,
  kValenceError,
  kMultiComponent,
};

const char *to_string(SmilesErrc code);

class SmilesError : public CodedError<SmilesErrc> {
 public:
  SmilesError(SmilesErrc code, std::size_t position, const std::string &what);

  // Byte offset into the input where the problem was detected.
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Parses a single-component SMILES string. Stereo markers are kept as atom
// and bond annotations; aromaticity is taken from the input as written.
Molecule parse_smiles(std::string_view text);

struct WriteOptions {
  bool stereo = false;
};

// Writes a SMILES string visiting atoms in ascending `ranks` order (start
// atom, branch order). Disconnected graphs are joined with '.'.
std::string write_smiles(const Molecule &mol, std::span<const int> ranks,
                         const WriteOptions &options = {});

// Graph-invariant atom ranking (0 = first written). Refines atom
// invariants by neighbourhood until stable, then breaks ties by exploring
// each candidate and keeping the lexicographically smallest string.
std::vector<int> canonical_ranks(const Molecule &mol);

// Deterministic representative for a molecule, used for deduplication.
// Stereo is not part of the canonical form.
std::string canonical_string(const Molecule &mol);

// Parse + canonicalize. Throws SmilesError.
std::string canonicalize(std::string_view text);

// A valid SMILES for the same molecule with a random atom order.
std::string random_smiles(const Molecule &mol, std::mt19937_64 &rng);

// --- Tokenization ---------------------------------------------------------

inline constexpr std::string_view kStartToken = "!";
inline constexpr std::string_view kEndToken = "~";
inline constexpr std::string_view kPadToken = "<";

// Splits text into tokens: bracket atoms, "Cl"/"Br", "%NN" ring closures,
// otherwise single characters. Never fails.
std::vector<std::string> segment_smiles(std::string_view text);

class Vocabulary {
 public:
  Vocabulary() = default;
  // Token list must contain the three reserved tokens exactly once and no
  // duplicates. Ids are positions in the list.
  explicit Vocabulary(std::vector<std::string> tokens);

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string &token(int id) const { return tokens_[static_cast<std::size_t>(id)]; }
  const std::vector<std::string> &tokens() const { return tokens_; }

  // -1 when absent.
  int id(std::string_view token) const;
  bool contains(std::string_view token) const { return id(token) >= 0; }

  int start_id() const { return start_; }
  int end_id() const { return end_; }
  int pad_id() const { return pad_; }

  // FNV-1a over the newline-joined token list; stored in checkpoints.
  std::uint64_t hash() const;

  friend bool operator==(const Vocabulary &a, const Vocabulary &b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  int start_ = -1, end_ = -1, pad_ = -1;
};

enum class TokenErrc {
  kEmptyCorpus,
  kContainsPrunedToken,
  kTooLong,
  kBadMinCount,
};

using TokenError = CodedError<TokenErrc>;

struct VocabularyBuild {
  Vocabulary vocabulary;
  // Tokens below the frequency threshold, with their corpus counts.
  std::map<std::string, std::size_t> pruned;
  std::map<std::string, std::size_t> counts;
};

// Tokens occurring fewer than min_count times across the corpus are pruned;
// reserved tokens are always kept. Tokens are sorted by byte value.
VocabularyBuild build_vocabulary(std::span<const std::string> corpus,
                                 std::size_t min_count);

// Throws TokenError kContainsPrunedToken naming the first unknown segment.
std::vector<int> tokenize(std::string_view text, const Vocabulary &vocab);

// Concatenates tokens, skipping a leading start id and stopping at the end
// id or the first pad id.
std::string detokenize(std::span<const int> ids, const Vocabulary &vocab);

// [start] + tokens + [end] + pads, length block_size + 2.
struct FramedSequence {
  std::vector<int> ids;
};

FramedSequence frame(std::span<const int> tokens, int block_size, const Vocabulary &vocab);

// Checks the framing invariants; returns an empty string when valid, else a
// description of the violation.
std::string check_framing(const FramedSequence &seq, int block_size, const Vocabulary &vocab);

}  // namespace molal

#endif  // MOLAL_SMILES_H_
