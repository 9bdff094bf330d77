// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_CORPUS_H_
#define MOLAL_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "molal/descriptors.h"
#include "molal/smiles.h"

namespace molal {

struct CorpusOptions {
  std::size_t min_count = 1000;
  int block_size = 133;
};

struct PreparedCorpus {
  Vocabulary vocabulary;
  std::map<std::string, std::size_t> pruned;
  std::vector<std::string> smiles;  // canonical, unique, in first-seen order
  std::vector<std::vector<int>> tokens;
  std::vector<FramedSequence> framed;
  std::vector<RejectedRow> rejects;
  std::size_t duplicates = 0;
};

// Parses, canonicalizes and deduplicates the input, builds the vocabulary
// with frequency pruning over the surviving strings, then drops strings
// that contain a pruned token or exceed the block size. Line numbers in
// the rejects are 1-based positions in `lines`.
PreparedCorpus prepare_corpus(std::span<const std::string> lines, const CorpusOptions &options);

// Same, against a fixed vocabulary (fine-tuning data). Duplicates are kept
// so replicas survive.
PreparedCorpus encode_corpus(std::span<const std::string> lines, const Vocabulary &vocab, int block_size);

// Deterministic drug-like SMILES assembled from ring, linker and
// substituent fragments. Every entry parses; entries are unique canonical
// strings.
std::vector<std::string> synthetic_corpus(std::size_t count, std::uint64_t seed);

}  // namespace molal

#endif  // MOLAL_CORPUS_H_
