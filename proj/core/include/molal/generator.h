// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_GENERATOR_H_
#define MOLAL_GENERATOR_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "molal/gpt.h"
#include "molal/molecule.h"
#include "molal/optimizer.h"
#include "molal/smiles.h"

namespace molal {

// Autoregressive SMILES model over a fixed vocabulary.
class SequenceModel {
 public:
  virtual ~SequenceModel() = default;
  virtual std::string kind() const = 0;
  virtual const Vocabulary &vocabulary() const = 0;
  // Maximum tokens between start and end.
  virtual int block_size() const = 0;
  // Token ids of one sample, excluding start and end. Sampling stops at
  // the end token or after block_size tokens. Temperature 0 is greedy.
  virtual std::vector<int> sample(std::mt19937_64 &rng, double temperature) const = 0;
  virtual void save(const std::filesystem::path &path) const = 0;
};

// Picks a token from unnormalized log-probabilities. Temperature 0 takes
// the arg-max (lowest id on ties).
int sample_token(std::span<const double> logits, double temperature, std::mt19937_64 &rng);

// Token-level order-n chain with additive smoothing over the vocabulary
// (start and pad excluded). Unseen contexts back off to shorter ones.
class MarkovModel : public SequenceModel {
 public:
  MarkovModel(Vocabulary vocab, int order, double pseudo_count, int block_size);

  // `sequences` hold token ids without start / end markers.
  static MarkovModel fit(std::span<const std::vector<int>> sequences, const Vocabulary &vocab,
                         int order, double pseudo_count, int block_size);

  // Mixes in the transitions of `sequences` so they make up `weight` of the
  // total transition mass.
  void fine_tune(std::span<const std::vector<int>> sequences, double weight);

  // Next-token distribution after `prefix` (which starts with the start id).
  std::vector<double> distribution(std::span<const int> prefix) const;

  std::string kind() const override { return "markov"; }
  const Vocabulary &vocabulary() const override { return vocab_; }
  int block_size() const override { return block_size_; }
  int order() const { return order_; }
  double pseudo_count() const { return alpha_; }
  std::vector<int> sample(std::mt19937_64 &rng, double temperature) const override;
  void save(const std::filesystem::path &path) const override;

  nlohmann::json to_json() const;
  static MarkovModel from_json(const nlohmann::json &j);

 private:
  using Table = std::unordered_map<std::string, std::vector<double>>;

  std::vector<Table> count_transitions(std::span<const std::vector<int>> sequences,
                                       double *total) const;
  std::string key(std::span<const int> prefix, int length) const;

  Vocabulary vocab_;
  int order_;
  double alpha_;
  int block_size_;
  double total_ = 0.0;
  std::vector<Table> tables_;  // tables_[m - 1]: contexts of length m
};

class GptModel : public SequenceModel {
 public:
  GptModel(Vocabulary vocab, Gpt gpt);

  std::string kind() const override { return "gpt"; }
  const Vocabulary &vocabulary() const override { return vocab_; }
  int block_size() const override { return gpt_.config().block_size; }
  std::vector<int> sample(std::mt19937_64 &rng, double temperature) const override;
  void save(const std::filesystem::path &path) const override;

  Gpt &gpt() { return gpt_; }
  const Gpt &gpt() const { return gpt_; }

 private:
  Vocabulary vocab_;
  Gpt gpt_;
};

// Reads either checkpoint kind; checks the stored vocabulary hash.
std::unique_ptr<SequenceModel> load_model(const std::filesystem::path &path);

struct TrainOptions {
  TrainSchedule schedule;
  OptimizerConfig optimizer;
  double grad_clip = 1.0;
  std::uint64_t seed = 0;
  // Stops early after this many steps when positive; the schedule still
  // spans the full run.
  long max_steps = 0;
};

struct TrainStep {
  long step = 0;
  double lr = 0.0;
  double loss = 0.0;
  double grad_norm = 0.0;     // before clipping
  double clipped_norm = 0.0;  // after clipping
  std::size_t tokens = 0;     // prediction targets in the batch
};

struct TrainResult {
  std::vector<TrainStep> trace;
};

// Trains on framed sequences (padding after the end token is dropped).
// Throws kNonFiniteLoss when a batch loss is not finite.
TrainResult train(Gpt &model, std::span<const FramedSequence> corpus, const Vocabulary &vocab,
                  const TrainOptions &options);

void write_loss_trace(const std::filesystem::path &path, const TrainResult &result);

struct GenerationRequest {
  std::size_t target = 100000;
  std::size_t max_attempts = 0;  // 0 = 20 * target
  double temperature = 1.0;
};

// Returns a rejection reason, or nullopt to accept.
using CandidateFilter = std::function<std::optional<std::string>(const Molecule &)>;

struct GenerationStats {
  std::size_t attempts = 0;
  std::size_t valid = 0;
  std::size_t duplicates = 0;
  std::size_t filtered = 0;
  std::size_t unique = 0;

  nlohmann::json to_json() const;
};

struct GenerationResult {
  std::vector<std::string> molecules;  // canonical, in discovery order
  GenerationStats stats;
  bool target_unreachable = false;
};

GenerationResult generate_unique(const SequenceModel &model, const GenerationRequest &request,
                                 const CandidateFilter &filter, std::mt19937_64 &rng);

}  // namespace molal

#endif  // MOLAL_GENERATOR_H_
