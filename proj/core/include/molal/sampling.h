// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_SAMPLING_H_
#define MOLAL_SAMPLING_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "molal/error.h"
#include "molal/scoring.h"

namespace molal {

enum class Method {
  kUniform,
  kLinear,
  kSoftsub,
  kSoftdiv,
};

const char *to_string(Method m);
Method method_from_string(std::string_view s);

enum class SamplingErrc {
  kAllZeroScores,
  kNoScoredClusters,
  kBadArgument,
  kEmptyPool,
};

using SamplingError = CodedError<SamplingErrc>;

struct ClusterScoreMap {
  std::vector<std::optional<double>> means;  // absent for clusters with no scored member
  std::vector<int> counts;

  int k() const { return static_cast<int>(means.size()); }
  int defined() const;
};

// Mean (or median) record score per cluster id. Records with a cluster id
// outside [0, k) are ignored.
ClusterScoreMap cluster_scores(std::span<const ScoreRecord> records, int k, bool median = false);

// Sampling fraction per cluster; clusters without a score get 0.
//   uniform  1 / defined
//   linear   s_i / sum s
//   softsub  exp(s_i - s_max) / sum
//   softdiv  exp(s_i / (divf * s_max)) / sum
// Throws kAllZeroScores when linear or softdiv is undefined.
std::vector<double> to_fractions(const ClusterScoreMap &scores, Method method, double divf = 0.25);

// Falls back to uniform on kAllZeroScores; *fell_back reports it.
std::vector<double> to_fractions_or_uniform(const ClusterScoreMap &scores, Method method,
                                            double divf, bool *fell_back);

// Smallest N with N * passers >= floor; 0 when there are no passers.
int replica_multiplier(std::size_t passers, int floor = 5000);

// Integer draws per cluster. Start from round-half-up(f_i * target) capped
// at the population; trim rounding overshoot from the largest round-ups,
// then hand the shortfall to clusters with spare capacity in proportion to
// their fractions (largest remainder), repeating until the goal
// min(target, population of clusters with f_i > 0) is met.
std::vector<int> allocate_quotas(std::span<const double> fractions, int target,
                                 std::span<const int> populations);

struct AlProvenance {
  std::string method;  // "naive" when no cluster sampling is done
  double divf = 0.0;
  double threshold = 0.0;
  int replica_multiplier = 0;
  std::size_t passers = 0;
  std::size_t replica_count = 0;
  std::size_t sampled_count = 0;
  bool fell_back_to_uniform = false;
  std::vector<double> fractions;
  std::vector<int> quotas;
  std::vector<int> draws;

  nlohmann::json to_json() const;
};

struct AlTrainingSet {
  std::vector<std::string> replicas;  // each passer repeated N times
  std::vector<std::string> sampled;
  AlProvenance provenance;

  std::vector<std::string> all() const;
  std::size_t size() const { return replicas.size() + sampled.size(); }
};

struct AssembleOptions {
  double threshold = kAblThreshold;
  std::optional<Method> method = Method::kSoftsub;  // nullopt = naive
  double divf = 0.25;
  int replica_floor = 5000;
  int sample_target = 5000;
  bool median = false;
};

// pool[i] is the canonical SMILES of generated molecule i and
// assignments[i] its cluster. Sampled molecules are drawn without
// replacement from pool members that were not scored.
AlTrainingSet assemble_al_set(std::span<const ScoreRecord> scored,
                              std::span<const std::string> pool,
                              std::span<const int> assignments, int k,
                              const AssembleOptions &options, std::mt19937_64 &rng);

void save_al_set(const std::filesystem::path &smi_path, const AlTrainingSet &set);

}  // namespace molal

#endif  // MOLAL_SAMPLING_H_
