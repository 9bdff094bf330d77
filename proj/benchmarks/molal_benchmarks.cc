// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "molal/clustering.h"
#include "molal/corpus.h"
#include "molal/descriptors.h"
#include "molal/filters.h"
#include "molal/fingerprints.h"
#include "molal/generator.h"
#include "molal/gpt.h"
#include "molal/proxy.h"
#include "molal/sampling.h"
#include "molal/smiles.h"

namespace {

const std::vector<std::string> &corpus() {
  static const std::vector<std::string> c = molal::synthetic_corpus(2000, 11);
  return c;
}

molal::Matrix random_points(int n, int d, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  molal::Matrix m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = g(rng) + (i % 7) * 2.0;
  return m;
}

void BM_ParseSmiles(benchmark::State &state) {
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(molal::parse_smiles(corpus()[i++ % corpus().size()]));
  }
}
BENCHMARK(BM_ParseSmiles);

void BM_Canonicalize(benchmark::State &state) {
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(molal::canonicalize(corpus()[i++ % corpus().size()]));
  }
}
BENCHMARK(BM_Canonicalize);

void BM_Mqn(benchmark::State &state) {
  std::vector<molal::Molecule> mols;
  for (std::size_t i = 0; i < 200; ++i) mols.push_back(molal::parse_smiles(corpus()[i]));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(molal::compute_mqn(mols[i++ % mols.size()]));
}
BENCHMARK(BM_Mqn);

void BM_FitPca(benchmark::State &state) {
  const molal::Matrix rows = random_points(static_cast<int>(state.range(0)), 42, 3);
  for (auto _ : state) benchmark::DoNotOptimize(molal::fit_pca(rows, "bench", 16));
}
BENCHMARK(BM_FitPca)->Arg(2000)->Arg(20000);

void BM_KMeans(benchmark::State &state) {
  const molal::Matrix points = random_points(static_cast<int>(state.range(0)), 16, 5);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(molal::kmeans(points, 25, seed++));
}
BENCHMARK(BM_KMeans)->Arg(2000)->Arg(10000);

void BM_AllocateQuotas(benchmark::State &state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  std::uniform_int_distribution<int> pop(0, 200);
  molal::ClusterScoreMap scores;
  std::vector<int> populations;
  for (int c = 0; c < 100; ++c) {
    scores.means.push_back(u(rng));
    scores.counts.push_back(10);
    populations.push_back(pop(rng));
  }
  for (auto _ : state) {
    const auto f = molal::to_fractions(scores, molal::Method::kSoftdiv, 0.25);
    benchmark::DoNotOptimize(molal::allocate_quotas(f, 5000, populations));
  }
}
BENCHMARK(BM_AllocateQuotas);

void BM_CircularFingerprint(benchmark::State &state) {
  const molal::Molecule m = molal::parse_smiles("CC(=O)Oc1ccccc1C(=O)Nc1ccc(Cl)cc1N1CCNCC1");
  for (auto _ : state) benchmark::DoNotOptimize(molal::circular_fingerprint(m, 2));
}
BENCHMARK(BM_CircularFingerprint);

void BM_PathFingerprint(benchmark::State &state) {
  const molal::Molecule m = molal::parse_smiles("CC(=O)Oc1ccccc1C(=O)Nc1ccc(Cl)cc1N1CCNCC1");
  for (auto _ : state) benchmark::DoNotOptimize(molal::path_fingerprint(m, 7));
}
BENCHMARK(BM_PathFingerprint);

void BM_FunctionalGroups(benchmark::State &state) {
  std::vector<molal::Molecule> mols;
  for (std::size_t i = 0; i < 200; ++i) mols.push_back(molal::parse_smiles(corpus()[i]));
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(molal::functional_group_filter(mols[i++ % mols.size()], molal::default_patterns()));
}
BENCHMARK(BM_FunctionalGroups);

void BM_GptForward(benchmark::State &state) {
  molal::GptConfig cfg = molal::GptConfig::desk(24, 64);
  const molal::Gpt gpt(cfg, 1);
  std::vector<int> ids(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(gpt.forward(ids));
}
BENCHMARK(BM_GptForward)->Arg(16)->Arg(64);

void BM_MarkovSample(benchmark::State &state) {
  const molal::PreparedCorpus prepared = molal::prepare_corpus(corpus(), {1, 133});
  const auto model = molal::MarkovModel::fit(prepared.tokens, prepared.vocabulary, 5, 0.01, 133);
  std::mt19937_64 rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(model.sample(rng, 1.0));
}
BENCHMARK(BM_MarkovSample);

}  // namespace

BENCHMARK_MAIN();
