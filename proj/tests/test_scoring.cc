// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "molal/scoring.h"
#include "molal/smiles.h"
#include "oracles.h"
#include "test_util.h"

namespace molal {
namespace {

TEST(Weights, DefaultTable) {
  const WeightTable w;
  EXPECT_EQ(w[Interaction::kHydrophobic], 2.5);
  EXPECT_EQ(w[Interaction::kHbond], 3.5);
  EXPECT_EQ(w[Interaction::kIonic], 7.5);
  EXPECT_EQ(w[Interaction::kCationPi], 2.5);
  EXPECT_EQ(w[Interaction::kVdw], 1.0);
  EXPECT_EQ(w[Interaction::kHalogenBond], 3.0);
  EXPECT_EQ(w[Interaction::kPiFace], 3.0);
  EXPECT_EQ(w[Interaction::kPiEdge], 1.0);
  EXPECT_EQ(w[Interaction::kMetallic], 3.0);
  EXPECT_EQ(kAblThreshold, 37.0);
  EXPECT_EQ(kHnhThreshold, 11.0);
}

TEST(Score, HandComputedOnRandomFingerprints) {
  const double weights[9] = {2.5, 3.5, 7.5, 2.5, 1.0, 3.0, 3.0, 1.0, 3.0};
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> count(0, 12);
  for (int t = 0; t < 50; ++t) {
    InteractionFingerprint fp;
    double want = 0.0;
    for (int i = 0; i < 9; ++i) {
      fp.counts[static_cast<std::size_t>(i)] = count(rng);
      want += weights[i] * static_cast<double>(fp.counts[static_cast<std::size_t>(i)]);
    }
    EXPECT_NEAR(score(fp, WeightTable()), want, 1e-12);
  }
}

TEST(Score, Fixtures) {
  InteractionFingerprint fp;
  fp[Interaction::kHbond] = 2;
  fp[Interaction::kHydrophobic] = 4;
  fp[Interaction::kPiFace] = 1;
  EXPECT_EQ(score(fp, WeightTable()), 20.0);
  EXPECT_EQ(score(InteractionFingerprint{}, WeightTable()), 0.0);
}

TEST(Score, LinearityAndScaling) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> count(0, 9);
  const WeightTable w;
  for (int t = 0; t < 20; ++t) {
    InteractionFingerprint a, b;
    for (std::size_t i = 0; i < 9; ++i) {
      a.counts[i] = count(rng);
      b.counts[i] = count(rng);
    }
    EXPECT_NEAR(score(a + b, w), score(a, w) + score(b, w), 1e-12);
    EXPECT_NEAR(score(a, w.scaled(2.5)), 2.5 * score(a, w), 1e-12);
  }
}

TEST(Weights, JsonRoundTrip) {
  const WeightTable w = WeightTable().scaled(0.5);
  EXPECT_EQ(WeightTable::from_json(w.to_json()).weights(), w.weights());
  nlohmann::json bad = w.to_json();
  bad.erase("ionic");
  EXPECT_THROW(WeightTable::from_json(bad), Error);
}

TEST(Names, AliasesMapToTypes) {
  EXPECT_EQ(interaction_from_name("hydrophobic"), Interaction::kHydrophobic);
  EXPECT_EQ(interaction_from_name("HBDonor"), Interaction::kHbond);
  EXPECT_EQ(interaction_from_name("HBAcceptor"), Interaction::kHbond);
  EXPECT_EQ(interaction_from_name("XBDonor"), Interaction::kHalogenBond);
  EXPECT_EQ(interaction_from_name("EdgeToFace"), Interaction::kPiEdge);
  EXPECT_EQ(interaction_from_name("MetalAcceptor"), Interaction::kMetallic);
  EXPECT_FALSE(interaction_from_name("nonsense").has_value());
  for (int i = 0; i < kInteractionCount; ++i) {
    const auto t = static_cast<Interaction>(i);
    EXPECT_EQ(interaction_from_name(interaction_name(t)), t);
  }
}

TEST(Ingest, SumsAliasesAndKeepsMaxOnCollision) {
  std::istringstream in(
      "smiles,HBDonor,HBAcceptor,ionic\n"
      "CCO,1,2,0\n"
      "OCC,0,0,1\n"
      "C1CC,1,1,1\n"
      "CCN,-1,0,0\n"
      "CCC,1.5,0,0\n"
      "c1ccccc1,0,0,0\n");
  const FingerprintIngest r = ingest_fingerprints(in);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.rejects.size(), 3u);
  ASSERT_EQ(r.collisions.size(), 1u);
  EXPECT_EQ(r.collisions[0], canonicalize("CCO"));
  for (const ScoreRecord &rec: r.records) {
    if (rec.smiles == canonicalize("CCO")) {
      ASSERT_TRUE(rec.fingerprint.has_value());
      EXPECT_EQ((*rec.fingerprint)[Interaction::kHbond], 3);
      EXPECT_EQ(rec.score, 10.5);
    }
  }
}

TEST(Ingest, UnknownColumnThrows) {
  std::istringstream in("smiles,wobble\nCCO,1\n");
  try {
    ingest_fingerprints(in);
    FAIL();
  } catch (const ScoringError &e) {
    EXPECT_EQ(e.code(), ScoringErrc::kUnknownColumn);
  }
}

TEST(Evaluate, PearsonMatchesDirectFormula) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(50), y(50);
    for (std::size_t i = 0; i < 50; ++i) {
      x[i] = 30.0 + 5.0 * g(rng);
      y[i] = 0.3 * x[i] + g(rng);
    }
    const ScoreEvaluation e = evaluate_scores(x, y, 31.0);
    EXPECT_NEAR(e.pearson, oracle::pearson_direct(x, y), 1e-12);
    std::size_t above = 0;
    for (double v: x)
      above += v >= 31.0 ? 1 : 0;
    EXPECT_EQ(e.fraction_at_or_above, static_cast<double>(above) / 50.0);
    EXPECT_EQ(e.n, 50u);
  }
}

TEST(Evaluate, Errors) {
  const std::vector<double> a = {1, 2, 3}, b = {1, 2};
  EXPECT_THROW(evaluate_scores(a, b, 0), ScoringError);
  const std::vector<double> flat = {1, 1, 1};
  try {
    evaluate_scores(flat, a, 0);
    FAIL();
  } catch (const ScoringError &e) {
    EXPECT_EQ(e.code(), ScoringErrc::kDegenerateVariance);
  }
}

TEST(Oracle, ShapeAndClamp) {
  OracleConfig cfg;
  cfg.base = 1.0;
  cfg.amplitude = 10.0;
  cfg.sigma = 2.0;
  cfg.target = {1.0, -1.0};
  ProxyPoint at(3);
  at << 1.0, -1.0, 100.0;
  EXPECT_NEAR(synthetic_oracle(at, cfg), 11.0, 1e-12);
  ProxyPoint off(2);
  off << 3.0, -1.0;
  EXPECT_NEAR(synthetic_oracle(off, cfg), 1.0 + 10.0 * std::exp(-4.0 / 8.0), 1e-12);
  cfg.base = -50.0;
  EXPECT_EQ(synthetic_oracle(off, cfg), 0.0);
  cfg.base = 0.0;
  cfg.amplitude = 0.0;
  cfg.trend = {2.0};
  EXPECT_NEAR(synthetic_oracle(off, cfg), 6.0, 1e-12);
  EXPECT_EQ(OracleConfig::from_json(cfg.to_json()).trend, cfg.trend);
}

TEST(Records, RoundTripIncludingSubnormal) {
  testing::TempDir dir("rec");
  const std::vector<ScoreRecord> recs = {
      {"CCO", 3, std::nullopt, 12.25},
      {"C(C)O,", -1, std::nullopt, 4.9406564584124654e-324},
      {"c1ccccc1", 0, std::nullopt, 1.0 / 3.0},
  };
  write_score_records(dir.path() / "s.csv", recs);
  const auto back = read_score_records(dir.path() / "s.csv");
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].smiles, recs[i].smiles);
    EXPECT_EQ(back[i].cluster, recs[i].cluster);
    EXPECT_EQ(back[i].score, recs[i].score);
  }
}

TEST(TableSource, LooksUpAndThrowsOnMissing) {
  const std::vector<ScoreRecord> recs = {{canonicalize("CCO"), -1, std::nullopt, 5.0}};
  const TableScoreSource src(recs);
  EXPECT_EQ(src.score(canonicalize("OCC"), ProxyPoint()), 5.0);
  EXPECT_THROW(src.score("CCC", ProxyPoint()), ScoringError);
}

}  // namespace
}  // namespace molal
