// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_METRICS_H_
#define MOLAL_METRICS_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "molal/fingerprints.h"

namespace molal {

using CanonicalSet = std::unordered_set<std::string>;

// Canonical forms of the parseable entries; the rest are dropped.
CanonicalSet canonical_set(std::span<const std::string> smiles);

struct GenerationMetrics {
  std::size_t total = 0;
  std::size_t valid = 0;
  std::size_t unique = 0;
  std::size_t novel = 0;
  double validity = 0.0;    // valid / total
  double uniqueness = 0.0;  // unique / valid
  double novelty = 0.0;     // novel / unique
  // Set when a ratio had a zero denominator and was reported as 0.
  bool undefined = false;

  nlohmann::json to_json() const;
};

// training holds canonical SMILES.
GenerationMetrics generation_metrics(std::span<const std::string> generated, const CanonicalSet &training);

// Overlap between consecutive iterations, in percent. Every input is a set
// of canonical SMILES.
//   a: generated(i) found in al_set(i-1), relative to |generated(i)|
//   b: generated(i) found in scored(i-1), relative to |generated(i)|
//   c: al_set(i-1) found in generated(i), relative to |al_set(i-1)|
//   d: scored(i-1) found in generated(i), relative to |scored(i-1)|
struct Memorization {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  nlohmann::json to_json() const;
};

Memorization memorization(const CanonicalSet &generated, const CanonicalSet &al_set_prev,
                          const CanonicalSet &scored_prev);

// Percentage of `of` that also occurs in `in`; 0 for an empty `of`.
double overlap_percent(const CanonicalSet &of, const CanonicalSet &in);

struct SimilarityRow {
  std::string reference;
  double mean = 0.0;
  double max = 0.0;
  std::string argmax;  // first molecule attaining the maximum
};

// One row per parseable reference against every parseable molecule.
std::vector<SimilarityRow> similarity_report(std::span<const std::string> references,
                                             std::span<const std::string> molecules,
                                             FingerprintKind kind = {});

// Mean Tanimoto similarity of a molecule set to one reference.
double mean_similarity(std::span<const std::string> molecules, const std::string &reference,
                       FingerprintKind kind = {});

// CSV "reference,mean_tc,max_tc,argmax_smiles".
void write_similarity_report(const std::filesystem::path &path, std::span<const SimilarityRow> rows);

}  // namespace molal

#endif  // MOLAL_METRICS_H_
