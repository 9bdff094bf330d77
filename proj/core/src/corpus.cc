// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/corpus.h"

#include <random>
#include <unordered_set>
#include <utility>

namespace molal {

namespace {

struct RingTemplate {
  std::vector<std::string> atoms;
  std::vector<bool> open;  // may carry a substituent
};

const std::vector<RingTemplate> &ring_templates() {
  static const std::vector<RingTemplate> rings = {
      {{"c", "c", "c", "c", "c", "c"}, {true, true, true, true, true, true}},
      {{"c", "c", "n", "c", "c", "c"}, {true, true, false, true, true, true}},
      {{"c", "n", "c", "n", "c", "c"}, {true, false, true, false, true, true}},
      {{"c", "c", "c", "o", "c"}, {true, true, true, false, true}},
      {{"c", "c", "c", "s", "c"}, {true, true, true, false, true}},
      {{"c", "c", "c", "[nH]", "c"}, {true, true, true, false, true}},
      {{"c", "s", "c", "n", "c"}, {true, false, true, false, true}},
      {{"C", "C", "C", "C", "C", "C"}, {true, true, true, true, true, true}},
      {{"C", "C", "N", "C", "C"}, {true, true, false, true, true}},
      {{"C", "C", "N", "C", "C", "C"}, {true, true, false, true, true, true}},
      {{"C", "C", "O", "C", "C", "N"}, {true, true, false, true, true, false}},
      {{"C", "C", "C", "C", "C"}, {true, true, true, true, true}},
      {{"C", "C", "C"}, {true, true, true}},
      {{"C", "C", "N", "C", "C", "N"}, {true, true, false, true, true, false}},
  };
  return rings;
}

const std::vector<std::string> &linkers() {
  static const std::vector<std::string> l = {
      "", "C", "CC", "O", "N", "C(=O)N", "NC(=O)", "S(=O)(=O)N", "OC", "CN", "C(=O)", "NC(=O)N", "CCN", "C=C",
  };
  return l;
}

const std::vector<std::string> &substituents() {
  static const std::vector<std::string> s = {
      "C", "CC", "F", "Cl", "Br", "O", "N", "OC", "C#N", "C(F)(F)F", "C(N)=O", "S(C)(=O)=O", "C(=O)O",
      "N(C)C", "CO", "C(C)C", "OC(F)(F)F", "NC(C)=O", "CCO", "C1CC1",
  };
  return s;
}

std::string write_ring(const RingTemplate &ring, int digit, std::mt19937_64 &rng, double p_sub) {
  const std::size_t n = ring.atoms.size();
  const auto &subs = substituents();
  std::uniform_int_distribution<std::size_t> pick_sub(0, subs.size() - 1);
  std::bernoulli_distribution decorate(p_sub);
  const std::string d = digit < 10 ? std::to_string(digit) : "%" + std::to_string(digit);
  std::string out;
  // Atom 0 joins the preceding unit; the last atom continues the chain.
  for (std::size_t i = 0; i < n; ++i) {
    out += ring.atoms[i];
    if (i == 0) out += d;
    if (i > 0 && i + 1 < n && ring.open[i] && decorate(rng)) out += "(" + subs[pick_sub(rng)] + ")";
    if (i + 1 == n) out += d;
  }
  return out;
}

std::string assemble(std::mt19937_64 &rng) {
  const auto &rings = ring_templates();
  const auto &links = linkers();
  const auto &subs = substituents();
  std::uniform_int_distribution<std::size_t> pick_ring(0, rings.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_link(0, links.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_sub(0, subs.size() - 1);
  std::discrete_distribution<int> units({3, 5, 3, 1});
  std::bernoulli_distribution head(0.5), tail(0.6);
  std::uniform_real_distribution<double> density(0.1, 0.45);

  const int n_units = units(rng) + 1;
  const double p_sub = density(rng);
  std::string s;
  if (head(rng)) s += subs[pick_sub(rng)];
  for (int u = 0; u < n_units; ++u) {
    if (!s.empty()) s += links[pick_link(rng)];
    s += write_ring(rings[pick_ring(rng)], u + 1, rng, p_sub);
  }
  if (tail(rng)) s += links[pick_link(rng)] + subs[pick_sub(rng)];
  return s;
}

}  // namespace

PreparedCorpus prepare_corpus(std::span<const std::string> lines, const CorpusOptions &options) {
  PreparedCorpus out;
  std::vector<std::size_t> line_of;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string canonical;
    try {
      canonical = canonicalize(lines[i]);
    } catch (const Error &e) {
      out.rejects.push_back({i + 1, lines[i], e.what()});
      continue;
    }
    if (!seen.insert(canonical).second) {
      ++out.duplicates;
      continue;
    }
    out.smiles.push_back(std::move(canonical));
    line_of.push_back(i + 1);
  }
  VocabularyBuild vb = build_vocabulary(out.smiles, options.min_count);
  out.vocabulary = std::move(vb.vocabulary);
  out.pruned = std::move(vb.pruned);

  std::vector<std::string> kept;
  for (std::size_t i = 0; i < out.smiles.size(); ++i) {
    try {
      std::vector<int> ids = tokenize(out.smiles[i], out.vocabulary);
      out.framed.push_back(frame(ids, options.block_size, out.vocabulary));
      out.tokens.push_back(std::move(ids));
      kept.push_back(std::move(out.smiles[i]));
    } catch (const TokenError &e) {
      out.rejects.push_back({line_of[i], out.smiles[i], e.what()});
    }
  }
  out.smiles = std::move(kept);
  return out;
}

PreparedCorpus encode_corpus(std::span<const std::string> lines, const Vocabulary &vocab, int block_size) {
  PreparedCorpus out;
  out.vocabulary = vocab;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      std::string canonical = canonicalize(lines[i]);
      std::vector<int> ids = tokenize(canonical, vocab);
      out.framed.push_back(frame(ids, block_size, vocab));
      out.tokens.push_back(std::move(ids));
      out.smiles.push_back(std::move(canonical));
    } catch (const Error &e) {
      out.rejects.push_back({i + 1, lines[i], e.what()});
    }
  }
  return out;
}

std::vector<std::string> synthetic_corpus(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::size_t attempts = 0;
  const std::size_t limit = 50 * count + 1000;
  while (out.size() < count && attempts < limit) {
    ++attempts;
    try {
      std::string c = canonicalize(assemble(rng));
      if (seen.insert(c).second) out.push_back(std::move(c));
    } catch (const Error &) {
    }
  }
  return out;
}

}  // namespace molal
