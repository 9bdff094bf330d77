// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_GPT_H_
#define MOLAL_GPT_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "molal/error.h"
#include "molal/linalg.h"
#include "molal/smiles.h"

namespace molal {

enum class GeneratorErrc {
  kBadConfig,
  kLengthExceeded,
  kNonFiniteLoss,
  kEmptyCorpus,
  kVocabularyMismatch,
  kFormat,
};

using GeneratorError = CodedError<GeneratorErrc>;

struct GptConfig {
  int vocab_size = 0;
  int block_size = 133;  // tokens between start and end
  int d_model = 256;
  int n_layers = 8;
  int n_heads = 8;
  int d_ff = 1024;
  double dropout = 0.1;
  double init_std = 0.02;

  // Framed length: block_size + 2.
  int context() const { return block_size + 2; }
  void validate() const;

  // d=64, 2 layers, 2 heads, FFN 256.
  static GptConfig desk(int vocab_size, int block_size);

  nlohmann::json to_json() const;
  static GptConfig from_json(const nlohmann::json &j);
};

// Decoder-only transformer: token + position + one learned type vector,
// pre-LN blocks (causal multi-head attention, GELU feed-forward), final
// layer norm and a biased projection to the vocabulary. Parameters live in
// one flat vector; gradients are computed analytically.
class Gpt {
 public:
  Gpt(const GptConfig &config, std::uint64_t seed);
  Gpt(const GptConfig &config, Vector parameters);

  const GptConfig &config() const { return config_; }
  const Vector &parameters() const { return params_; }
  Vector &parameters() { return params_; }
  std::size_t num_parameters() const { return static_cast<std::size_t>(params_.size()); }

  // 1 for entries of linear-layer weight matrices, 0 elsewhere.
  Vector decay_mask() const;

  // Logits (length x vocab) with dropout disabled.
  Matrix forward(std::span<const int> ids) const;

  // Mean next-token cross-entropy over all positions of the batch: token t
  // of a sequence is predicted from tokens 0..t-1. Callers drop the padding
  // that follows the end token, so pads carry no loss. When `dropout_rng` is
  // null dropout is disabled. With `label_rng` set, targets are sampled
  // from the model's own predictions instead of read from the data (used
  // for curvature estimates). `grad` may be null.
  double loss_and_grad(std::span<const std::vector<int>> batch, Vector *grad,
                       std::mt19937_64 *dropout_rng = nullptr,
                       std::mt19937_64 *label_rng = nullptr) const;

  // Incremental decoding with cached keys and values.
  class Decoder {
   public:
    explicit Decoder(const Gpt &model);
    // Feeds one token; returns next-token logits.
    Eigen::RowVectorXd step(int token);
    int position() const { return pos_; }

   private:
    const Gpt &model_;
    std::vector<Matrix> keys_;
    std::vector<Matrix> values_;
    int pos_ = 0;
  };

 private:
  struct LayerOffsets {
    std::size_t ln1_g, ln1_b, w_qkv, b_qkv, w_o, b_o, ln2_g, ln2_b, w1, b1, w2, b2;
  };

  struct Trace;

  void build_layout();
  // Full-sequence causal forward pass; fills `trace` for backprop when set.
  Matrix forward_full(std::span<const int> ids, std::mt19937_64 *dropout_rng, Trace *trace) const;
  double sequence_loss(std::span<const int> ids, double weight, Vector *grad,
                       std::mt19937_64 *dropout_rng, std::mt19937_64 *label_rng) const;

  GptConfig config_;
  Vector params_;
  std::size_t wte_ = 0, wpe_ = 0, wtype_ = 0, lnf_g_ = 0, lnf_b_ = 0, w_head_ = 0, b_head_ = 0;
  std::size_t total_ = 0;
  std::vector<LayerOffsets> layers_;
};

}  // namespace molal

#endif  // MOLAL_GPT_H_
