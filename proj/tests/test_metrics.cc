// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "molal/fingerprints.h"
#include "molal/io.h"
#include "molal/metrics.h"
#include "molal/smiles.h"
#include "oracles.h"
#include "test_util.h"

namespace molal {
namespace {

const FingerprintKind kCirc{FingerprintKind::kCircular, 2};
const FingerprintKind kPath{FingerprintKind::kPath, 7};

TEST(Tanimoto, Fixtures) {
  const Fingerprint a(kCirc, {1, 2, 3}), b(kCirc, {2, 3, 4}), c(kCirc, {7, 8});
  EXPECT_EQ(tanimoto(a, a), 1.0);
  EXPECT_EQ(tanimoto(a, c), 0.0);
  EXPECT_EQ(tanimoto(a, b), 0.5);
  EXPECT_EQ(tanimoto(b, a), 0.5);
  EXPECT_EQ(tanimoto(Fingerprint(kCirc, {}), Fingerprint(kCirc, {})), 1.0);
  try {
    tanimoto(a, Fingerprint(kPath, {1}));
    FAIL();
  } catch (const MetricsError &e) {
    EXPECT_EQ(e.code(), MetricsErrc::kKindMismatch);
  }
}

TEST(Fingerprint, SortsAndDedupes) {
  const Fingerprint f(kCirc, {5, 1, 5, 3});
  EXPECT_EQ(f.ids(), (std::vector<std::uint32_t>{1, 3, 5}));
  EXPECT_TRUE(f.contains(3));
  EXPECT_FALSE(f.contains(4));
}

TEST(Fingerprint, FeatureHashIsTruncatedFnv) {
  const std::vector<std::uint64_t> words = {1, 0xdeadbeef};
  std::uint64_t h = 14695981039346656037ULL;
  for (std::uint64_t w: words)
    for (int i = 0; i < 8; ++i) {
      h ^= (w >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  EXPECT_EQ(feature_hash(words), static_cast<std::uint32_t>(h));
}

TEST(Circular, IdenticalAndPermutationInvariant) {
  std::mt19937_64 rng(2);
  for (const std::string &s: testing::drug_like()) {
    const Molecule m = parse_smiles(s);
    const Fingerprint want = circular_fingerprint(m);
    EXPECT_EQ(circular_fingerprint(parse_smiles(s)), want);
    for (int t = 0; t < 5; ++t)
      EXPECT_EQ(circular_fingerprint(m.permuted(testing::random_permutation(m.num_atoms(), rng))), want);
  }
}

TEST(Circular, EthanolVersusPropane) {
  const Fingerprint a = circular_fingerprint(parse_smiles("CCO"));
  const Fingerprint b = circular_fingerprint(parse_smiles("CCC"));
  std::vector<std::uint32_t> shared, diff;
  std::set_intersection(a.ids().begin(), a.ids().end(), b.ids().begin(), b.ids().end(), std::back_inserter(shared));
  std::set_symmetric_difference(a.ids().begin(), a.ids().end(), b.ids().begin(), b.ids().end(),
                                std::back_inserter(diff));
  // The terminal methyl environment is common to both.
  EXPECT_FALSE(shared.empty());
  EXPECT_FALSE(diff.empty());
  EXPECT_GT(tanimoto(a, b), 0.0);
  EXPECT_LT(tanimoto(a, b), 1.0);
}

TEST(Circular, RadiusGrowsFeatureSet) {
  const Molecule m = parse_smiles("CC(=O)Nc1ccc(O)cc1");
  const Fingerprint r0 = circular_fingerprint(m, 0);
  const Fingerprint r2 = circular_fingerprint(m, 2);
  for (std::uint32_t id: r0.ids())
    EXPECT_TRUE(r2.contains(id));
  EXPECT_GT(r2.size(), r0.size());
}

TEST(Path, SingleAtomHasOneFeature) {
  const Molecule m = parse_smiles("C");
  EXPECT_EQ(enumerate_paths(m, 7).size(), 1u);
  EXPECT_EQ(path_fingerprint(m).size(), 1u);
}

TEST(Path, LinearAlkaneCountsMatchFormula) {
  for (int n = 1; n <= 12; ++n) {
    const Molecule m = parse_smiles(std::string(static_cast<std::size_t>(n), 'C'));
    for (int maxlen: {0, 1, 3, 7})
      EXPECT_EQ(enumerate_paths(m, maxlen).size(), oracle::chain_path_count(n, maxlen)) << n << " " << maxlen;
  }
}

TEST(Path, EachUndirectedPathOnce) {
  const Molecule m = parse_smiles("c1ccccc1CC(N)O");
  const auto paths = enumerate_paths(m, 5);
  std::set<std::vector<int>> seen;
  for (auto p: paths) {
    std::set<int> atoms(p.begin(), p.end());
    EXPECT_EQ(atoms.size(), p.size());
    for (std::size_t i = 1; i < p.size(); ++i)
      EXPECT_GE(m.find_bond(p[i - 1], p[i]), 0);
    std::vector<int> r(p.rbegin(), p.rend());
    EXPECT_TRUE(seen.insert(std::min(p, r)).second);
  }
}

TEST(Path, PermutationInvariant) {
  std::mt19937_64 rng(8);
  for (const std::string &s: testing::drug_like()) {
    const Molecule m = parse_smiles(s);
    const Fingerprint want = path_fingerprint(m);
    for (int t = 0; t < 3; ++t)
      EXPECT_EQ(path_fingerprint(m.permuted(testing::random_permutation(m.num_atoms(), rng))), want);
  }
}

TEST(GenerationMetrics, HandCountedFixture) {
  // 2 unparseable, one duplicate pair, 3 already in training.
  const std::vector<std::string> generated = {
      "CCO", "OCC", "CCN", "CCC", "c1ccccc1", "CC(=O)O", "CCCl", "CN", "C1CC", "Xx",
  };
  const std::vector<std::string> training_raw = {"NCC", "CCC", "c1ccccc1", "CCCCCC"};
  const GenerationMetrics m = generation_metrics(generated, canonical_set(training_raw));
  EXPECT_EQ(m.total, 10u);
  EXPECT_EQ(m.valid, 8u);
  EXPECT_EQ(m.unique, 7u);
  EXPECT_EQ(m.novel, 4u);
  EXPECT_EQ(m.validity, 0.8);
  EXPECT_EQ(m.uniqueness, 7.0 / 8.0);
  EXPECT_EQ(m.novelty, 4.0 / 7.0);
  EXPECT_FALSE(m.undefined);
}

TEST(GenerationMetrics, DegenerateCases) {
  const std::vector<std::string> train = {"CCO", "CCN"};
  const GenerationMetrics same = generation_metrics(train, canonical_set(train));
  EXPECT_EQ(same.novelty, 0.0);
  const std::vector<std::string> junk = {"C1", "(("};
  const GenerationMetrics bad = generation_metrics(junk, canonical_set(train));
  EXPECT_EQ(bad.validity, 0.0);
  EXPECT_EQ(bad.uniqueness, 0.0);
  EXPECT_EQ(bad.novelty, 0.0);
  EXPECT_TRUE(bad.undefined);
}

TEST(Memorization, Overlaps) {
  const CanonicalSet gen = {"a", "b", "c", "d"};
  const CanonicalSet al = {"a", "x"};
  const CanonicalSet scored = {"a", "b", "y", "z", "w"};
  const Memorization m = memorization(gen, al, scored);
  EXPECT_EQ(m.a, 25.0);
  EXPECT_EQ(m.b, 50.0);
  EXPECT_EQ(m.c, 50.0);
  EXPECT_EQ(m.d, 40.0);
  EXPECT_EQ(overlap_percent({}, gen), 0.0);
}

TEST(Similarity, ReportAndMean) {
  const std::vector<std::string> refs = {"CCO", "c1ccccc1"};
  const std::vector<std::string> mols = {"CCO", "CCN", "c1ccccc1C"};
  const auto rows = similarity_report(refs, mols);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].max, 1.0);
  EXPECT_EQ(rows[0].argmax, "CCO");
  // Reported as given.
  EXPECT_EQ(rows[1].argmax, "c1ccccc1C");
  EXPECT_NEAR(rows[0].mean, mean_similarity(mols, "CCO"), 1e-15);
  double total = 0;
  const Fingerprint r = circular_fingerprint(parse_smiles("c1ccccc1"));
  for (const std::string &s: mols)
    total += tanimoto(r, circular_fingerprint(parse_smiles(s)));
  EXPECT_NEAR(rows[1].mean, total / 3.0, 1e-15);
  testing::TempDir dir("sim");
  write_similarity_report(dir.path() / "s.csv", rows);
  const CsvTable t = read_csv(dir.path() / "s.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"reference", "mean_tc", "max_tc", "argmax_smiles"}));
  EXPECT_EQ(t.rows.size(), 2u);
}

}  // namespace
}  // namespace molal
