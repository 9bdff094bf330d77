// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_OPTIMIZER_H_
#define MOLAL_OPTIMIZER_H_

#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "molal/linalg.h"

namespace molal {

struct TrainSchedule {
  int batch_size = 64;
  int epochs = 1;
  double peak_lr = 3e-4;
  double floor_lr = 3e-5;
  double warmup_fraction = 0.1;  // of all training tokens

  void validate() const;

  // Warm up to 3e-4 over 10% of tokens, cosine to 3e-5, batch 512, 30 epochs.
  static TrainSchedule pretraining();
  // 3e-5 to 3e-6 cosine without warm-up, batch 512, 10 epochs.
  static TrainSchedule fine_tuning();

  nlohmann::json to_json() const;
  static TrainSchedule from_json(const nlohmann::json &j);
};

// Learning rate at training progress u in [0, 1] (fraction of tokens seen
// before the step, relative to the tokens seen before the final step):
// linear warm-up from 0 to peak over the warm-up fraction, then cosine
// decay to the floor, reaching it at u = 1.
double learning_rate(const TrainSchedule &s, double u);

// Scales `grad` in place so its L2 norm is at most max_norm; returns the
// norm before clipping.
double clip_grad_norm(Vector &grad, double max_norm);

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual std::string name() const = 0;
  virtual void step(Vector &params, const Vector &grad, double lr) = 0;
  // Whether step `t` (0-based) wants a fresh curvature estimate first.
  virtual bool wants_hessian(long /*t*/) const { return false; }
  virtual void update_hessian(const Vector & /*sampled_grad*/) { }
};

struct OptimizerConfig {
  std::string kind = "adamw";  // adamw | sophiag
  double beta1 = 0.9;
  double beta2 = 0.95;
  double eps = 1e-8;
  double weight_decay = 0.1;  // decoupled, linear-layer weights only
  double rho = 0.04;          // sophiag clipping scale
  int hessian_interval = 10;  // sophiag
  double tokens_per_batch = 1.0;

  // beta1 0.965, beta2 0.99, rho 0.04.
  static OptimizerConfig sophiag();

  nlohmann::json to_json() const;
  static OptimizerConfig from_json(const nlohmann::json &j);
};

// `decay_mask` selects the parameters that receive weight decay.
std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig &cfg, const Vector &decay_mask);

}  // namespace molal

#endif  // MOLAL_OPTIMIZER_H_
