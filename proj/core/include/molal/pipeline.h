// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_PIPELINE_H_
#define MOLAL_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "molal/error.h"
#include "molal/gpt.h"
#include "molal/optimizer.h"
#include "molal/proxy.h"
#include "molal/sampling.h"
#include "molal/scoring.h"

namespace molal {

enum class PipelineErrc {
  kBadConfig,
  kStage,
  kMissingArtifact,
  kState,
};

using PipelineError = CodedError<PipelineErrc>;

enum class Mode {
  kComplete,  // cluster-based scoring sample, score-weighted cluster sampling
  kUniform,   // same, with equal cluster fractions
  kNaive,     // random scoring sample, replicas only
};

const char *to_string(Mode m);
Mode mode_from_string(std::string_view s);

struct CorpusConfig {
  std::string path;  // one SMILES per line; empty = synthetic corpus
  std::size_t synthetic_size = 20000;
  std::size_t min_count = 1000;
  int block_size = 133;
};

struct GeneratorConfig {
  std::string kind = "markov";  // markov | gpt
  int order = 5;
  double pseudo_count = 0.01;
  // Markov fine-tuning gives an AL set of n sequences the share
  // n / (n + finetune_prior) of the transition mass.
  double finetune_prior = 1000.0;
  GptConfig gpt;  // vocab_size and block_size are filled in at pretraining
  TrainSchedule pretrain = TrainSchedule::pretraining();
  TrainSchedule finetune = TrainSchedule::fine_tuning();
  OptimizerConfig optimizer;
  double grad_clip = 1.0;
};

struct GenerationConfig {
  std::size_t target = 100000;
  std::size_t max_attempts = 0;
  double temperature = 1.0;
  bool admet_filter = false;
  bool group_filter = false;
  bool strict = false;
  std::string bounds_path;    // empty = built-in bounds
  std::string patterns_path;  // empty = built-in patterns
};

struct ProxyConfig {
  std::string descriptor_table;  // empty = native MQN descriptors
  int components = 120;          // capped at the feature count
  Scaling scaling = Scaling::kStandardize;
};

struct ClusteringConfig {
  int k = 100;
  int restarts = 100;
  int max_iterations = 300;
  int per_cluster = 10;
  int sample = 1000;
};

struct ScoringConfig {
  std::string source = "oracle";  // oracle | table
  // Interaction fingerprint CSV for the table source.
  std::string table;
  WeightTable weights;
  double threshold = kAblThreshold;
  // Evaluated on proxy coordinates divided by the component standard
  // deviations.
  OracleConfig oracle;
};

struct AlSetConfig {
  int replica_floor = 5000;
  int sample_target = 5000;
  bool median = false;
};

struct ReportConfig {
  double histogram_bin = 2.0;
  std::string references;  // SMILES file for the similarity report
};

// Mixing weight of an AL set with n sequences.
double markov_finetune_weight(std::size_t n, double prior);

struct RunConfig {
  std::string preset = "full";
  Mode mode = Mode::kComplete;
  Method method = Method::kSoftsub;
  double divf = 0.25;
  std::uint64_t seed = 0;
  int iterations = 5;
  CorpusConfig corpus;
  GeneratorConfig generator;
  GenerationConfig generation;
  ProxyConfig proxy;
  ClusteringConfig clustering;
  ScoringConfig scoring;
  AlSetConfig al_set;
  ReportConfig report;

  // Laptop-scale preset with the synthetic oracle and a Markov generator.
  static RunConfig desk();
  // Full-scale counts and the transformer generator.
  static RunConfig full();

  // Throws PipelineError kBadConfig.
  void validate() const;

  nlohmann::json to_json() const;
  // Starts from the preset named by "preset" (default full) and overrides
  // the keys present in j.
  static RunConfig from_json(const nlohmann::json &j);
  static RunConfig load(const std::filesystem::path &path);

  // FNV-1a of the serialized config.
  std::uint64_t hash() const;
};

// Stage ids mixed into derive_seed(config.seed, iteration * 16 + stage).
enum class Stage : int {
  kCorpus = 0,
  kPretrain = 1,
  kGenerate = 2,
  kCluster = 3,
  kSample = 4,
  kAssemble = 5,
  kFinetune = 6,
};

std::uint64_t stage_seed(const RunConfig &config, int iteration, Stage stage);

// Paths of one iteration's artifacts inside a run directory.
struct IterationState {
  int iteration = 0;
  std::filesystem::path run_dir;
  std::uint64_t config_hash = 0;

  std::filesystem::path dir() const;
  std::filesystem::path checkpoint() const { return dir() / "checkpoint"; }
  std::filesystem::path generated() const { return dir() / "generated.smi"; }
  std::filesystem::path clustering() const { return dir() / "clustering.bin"; }
  std::filesystem::path scores() const { return dir() / "scores.csv"; }
  std::filesystem::path alset() const { return dir() / "alset.smi"; }
  std::filesystem::path stats() const { return dir() / "stats.json"; }
};

// Run-level artifacts.
struct RunPaths {
  std::filesystem::path dir;

  std::filesystem::path config() const { return dir / "config.json"; }
  std::filesystem::path corpus() const { return dir / "corpus.smi"; }
  std::filesystem::path corpus_rejects() const { return dir / "corpus_rejects.csv"; }
  std::filesystem::path pca() const { return dir / "pca.json"; }
  std::filesystem::path iteration(int i) const { return dir / std::to_string(i); }
};

using ProgressFn = std::function<void(const std::string &)>;

// Writes config.json, prepares the pretraining corpus, fits the proxy on it
// and pretrains the generator into 0/checkpoint. Refuses a run directory
// that already holds a different config.
IterationState initialize_run(const std::filesystem::path &run_dir, const RunConfig &config,
                              const ProgressFn &progress = {});

// Generates, projects, clusters, samples and scores for state.iteration,
// then (unless it is the last iteration) assembles the AL set and
// fine-tunes into the next iteration's checkpoint. Stage failures throw
// PipelineError kStage naming the stage; artifacts written so far remain.
IterationState run_iteration(const IterationState &state, const RunConfig &config,
                             const ProgressFn &progress = {});

// Checks that iteration i has a checkpoint and the run's config hash.
IterationState load_state(const std::filesystem::path &run_dir, int iteration);

// Initializes if needed, then resumes from the latest checkpointed
// iteration until config.iterations is complete.
std::vector<IterationState> run_loop(const std::filesystem::path &run_dir, const RunConfig &config,
                                     const ProgressFn &progress = {});

}  // namespace molal

#endif  // MOLAL_PIPELINE_H_
