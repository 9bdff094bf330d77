// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/optimizer.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "molal/error.h"

namespace molal {
namespace {

class AdamW : public Optimizer {
 public:
  AdamW(const OptimizerConfig &cfg, Vector mask) : cfg_(cfg), mask_(std::move(mask)) { }

  std::string name() const override { return "adamw"; }

  void step(Vector &params, const Vector &grad, double lr) override {
    if (m_.size() != params.size()) {
      m_ = Vector::Zero(params.size());
      v_ = Vector::Zero(params.size());
    }
    ++t_;
    m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
    v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    params.array() *= 1.0 - lr * cfg_.weight_decay * mask_.array();
    params.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.eps);
  }

 private:
  OptimizerConfig cfg_;
  Vector mask_;
  Vector m_, v_;
  long t_ = 0;
};

class SophiaG : public Optimizer {
 public:
  SophiaG(const OptimizerConfig &cfg, Vector mask) : cfg_(cfg), mask_(std::move(mask)) { }

  std::string name() const override { return "sophiag"; }

  bool wants_hessian(long t) const override {
    return cfg_.hessian_interval > 0 && t % cfg_.hessian_interval == 0;
  }

  void update_hessian(const Vector &g) override {
    if (h_.size() != g.size())
      h_ = Vector::Zero(g.size());
    h_ = cfg_.beta2 * h_ + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
  }

  void step(Vector &params, const Vector &grad, double lr) override {
    if (m_.size() != params.size())
      m_ = Vector::Zero(params.size());
    if (h_.size() != params.size())
      h_ = Vector::Zero(params.size());
    m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
    params.array() *= 1.0 - lr * cfg_.weight_decay * mask_.array();
    const double denom_scale = cfg_.rho * cfg_.tokens_per_batch;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      const double ratio = std::min(std::abs(m_(i)) / (denom_scale * h_(i) + 1e-15), 1.0);
      params(i) -= lr * (m_(i) > 0 ? 1.0 : (m_(i) < 0 ? -1.0 : 0.0)) * ratio;
    }
  }

 private:
  OptimizerConfig cfg_;
  Vector mask_;
  Vector m_, h_;
};

}  // namespace

void TrainSchedule::validate() const {
  if (batch_size < 1 || epochs < 0)
    throw ValidationError("batch_size must be positive and epochs non-negative");
  if (!(floor_lr >= 0.0 && floor_lr <= peak_lr))
    throw ValidationError("learning rates must satisfy 0 <= floor <= peak");
  if (!(warmup_fraction >= 0.0 && warmup_fraction <= 1.0))
    throw ValidationError("warmup_fraction must be in [0, 1]");
}

TrainSchedule TrainSchedule::pretraining() {
  return {512, 30, 3e-4, 3e-5, 0.1};
}

TrainSchedule TrainSchedule::fine_tuning() {
  return {512, 10, 3e-5, 3e-6, 0.0};
}

nlohmann::json TrainSchedule::to_json() const {
  return {{"batch_size", batch_size}, {"epochs", epochs}, {"peak_lr", peak_lr},
          {"floor_lr", floor_lr},     {"warmup_fraction", warmup_fraction}};
}

TrainSchedule TrainSchedule::from_json(const nlohmann::json &j) {
  TrainSchedule s;
  s.batch_size = j.value("batch_size", s.batch_size);
  s.epochs = j.value("epochs", s.epochs);
  s.peak_lr = j.value("peak_lr", s.peak_lr);
  s.floor_lr = j.value("floor_lr", s.floor_lr);
  s.warmup_fraction = j.value("warmup_fraction", s.warmup_fraction);
  s.validate();
  return s;
}

double learning_rate(const TrainSchedule &s, double u) {
  u = std::clamp(u, 0.0, 1.0);
  const double w = s.warmup_fraction;
  if (w > 0.0 && u < w)
    return s.peak_lr * u / w;
  if (w >= 1.0)
    return s.peak_lr;
  const double t = (u - w) / (1.0 - w);
  return std::lerp(s.floor_lr, s.peak_lr, 0.5 * (1.0 + std::cos(std::numbers::pi * t)));
}

double clip_grad_norm(Vector &grad, double max_norm) {
  const double norm = grad.norm();
  if (max_norm > 0.0 && norm > max_norm)
    grad *= max_norm / norm;
  return norm;
}

OptimizerConfig OptimizerConfig::sophiag() {
  OptimizerConfig c;
  c.kind = "sophiag";
  c.beta1 = 0.965;
  c.beta2 = 0.99;
  c.rho = 0.04;
  return c;
}

nlohmann::json OptimizerConfig::to_json() const {
  return {{"kind", kind},
          {"beta1", beta1},
          {"beta2", beta2},
          {"eps", eps},
          {"weight_decay", weight_decay},
          {"rho", rho},
          {"hessian_interval", hessian_interval}};
}

OptimizerConfig OptimizerConfig::from_json(const nlohmann::json &j) {
  OptimizerConfig c = j.value("kind", std::string("adamw")) == "sophiag" ? sophiag() : OptimizerConfig();
  c.kind = j.value("kind", c.kind);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.eps = j.value("eps", c.eps);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.rho = j.value("rho", c.rho);
  c.hessian_interval = j.value("hessian_interval", c.hessian_interval);
  if (c.kind != "adamw" && c.kind != "sophiag")
    throw ValidationError("optimizer kind must be 'adamw' or 'sophiag'");
  return c;
}

std::unique_ptr<Optimizer> make_optimizer(const OptimizerConfig &cfg, const Vector &decay_mask) {
  if (cfg.kind == "adamw")
    return std::make_unique<AdamW>(cfg, decay_mask);
  if (cfg.kind == "sophiag")
    return std::make_unique<SophiaG>(cfg, decay_mask);
  throw ValidationError("unknown optimizer '" + cfg.kind + "'");
}

}  // namespace molal
