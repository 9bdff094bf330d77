// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "molal/hash.h"
#include "molal/smiles.h"

namespace molal {

std::vector<std::string> segment_smiles(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '[') {
      const std::size_t close = text.find(']', i);
      const std::size_t end = close == std::string_view::npos ? text.size() : close + 1;
      out.emplace_back(text.substr(i, end - i));
      i = end;
      continue;
    }
    if (i + 1 < text.size()) {
      const char d = text[i + 1];
      if ((c == 'C' && d == 'l') || (c == 'B' && d == 'r')) {
        out.emplace_back(text.substr(i, 2));
        i += 2;
        continue;
      }
    }
    if (c == '%' && i + 2 < text.size()
        && std::isdigit(static_cast<unsigned char>(text[i + 1]))
        && std::isdigit(static_cast<unsigned char>(text[i + 2]))) {
      out.emplace_back(text.substr(i, 3));
      i += 3;
      continue;
    }
    out.emplace_back(1, c);
    ++i;
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second)
      throw Error("duplicate vocabulary token '" + tokens_[i] + "'");
  }
  start_ = id(kStartToken);
  end_ = id(kEndToken);
  pad_ = id(kPadToken);
  if (start_ < 0 || end_ < 0 || pad_ < 0)
    throw Error("vocabulary is missing a reserved token");
}

int Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : it->second;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = kFnvOffset;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i > 0)
      h = fnv1a64("\n", h);
    h = fnv1a64(tokens_[i], h);
  }
  return h;
}

VocabularyBuild build_vocabulary(std::span<const std::string> corpus, std::size_t min_count) {
  if (min_count < 1)
    throw TokenError(TokenErrc::kBadMinCount, "min_count must be at least 1");
  if (corpus.empty())
    throw TokenError(TokenErrc::kEmptyCorpus, "cannot build a vocabulary from an empty corpus");

  VocabularyBuild out;
  for (const std::string &line: corpus) {
    for (std::string &t: segment_smiles(line))
      ++out.counts[std::move(t)];
  }

  std::set<std::string> kept = {
    std::string(kStartToken), std::string(kEndToken), std::string(kPadToken),
  };
  for (const auto &[token, count]: out.counts) {
    if (kept.count(token) != 0)
      continue;
    if (count >= min_count)
      kept.insert(token);
    else
      out.pruned.emplace(token, count);
  }
  out.vocabulary = Vocabulary(std::vector<std::string>(kept.begin(), kept.end()));
  return out;
}

std::vector<int> tokenize(std::string_view text, const Vocabulary &vocab) {
  std::vector<int> ids;
  for (const std::string &t: segment_smiles(text)) {
    const int id = vocab.id(t);
    if (id < 0)
      throw TokenError(TokenErrc::kContainsPrunedToken, "token '" + t + "' is not in the vocabulary");
    ids.push_back(id);
  }
  return ids;
}

std::string detokenize(std::span<const int> ids, const Vocabulary &vocab) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const int id = ids[i];
    if (i == 0 && id == vocab.start_id())
      continue;
    if (id == vocab.end_id() || id == vocab.pad_id())
      break;
    if (id < 0 || id >= vocab.size())
      throw Error("token id out of range");
    out += vocab.token(id);
  }
  return out;
}

FramedSequence frame(std::span<const int> tokens, int block_size, const Vocabulary &vocab) {
  if (block_size < 0 || tokens.size() > static_cast<std::size_t>(block_size))
    throw TokenError(TokenErrc::kTooLong, std::to_string(tokens.size())
                                              + " tokens exceed block size "
                                              + std::to_string(block_size));
  FramedSequence seq;
  seq.ids.reserve(static_cast<std::size_t>(block_size) + 2);
  seq.ids.push_back(vocab.start_id());
  seq.ids.insert(seq.ids.end(), tokens.begin(), tokens.end());
  seq.ids.push_back(vocab.end_id());
  seq.ids.resize(static_cast<std::size_t>(block_size) + 2, vocab.pad_id());
  return seq;
}

std::string check_framing(const FramedSequence &seq, int block_size, const Vocabulary &vocab) {
  const auto &ids = seq.ids;
  if (ids.size() != static_cast<std::size_t>(block_size) + 2)
    return "length " + std::to_string(ids.size()) + " != block_size + 2";
  if (ids.front() != vocab.start_id())
    return "position 0 is not the start token";
  const auto ends = std::count(ids.begin(), ids.end(), vocab.end_id());
  if (ends != 1)
    return "expected exactly one end token, found " + std::to_string(ends);
  const auto end_pos = static_cast<std::size_t>(
      std::find(ids.begin(), ids.end(), vocab.end_id()) - ids.begin());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= vocab.size())
      return "id out of range at position " + std::to_string(i);
    if (i < end_pos && ids[i] == vocab.pad_id())
      return "pad token before the end token at position " + std::to_string(i);
    if (i > end_pos && ids[i] != vocab.pad_id())
      return "non-pad token after the end token at position " + std::to_string(i);
    if (i > 0 && ids[i] == vocab.start_id())
      return "start token repeated at position " + std::to_string(i);
  }
  return {};
}

}  // namespace molal
