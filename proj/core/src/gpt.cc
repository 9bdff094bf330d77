// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/gpt.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace molal {
namespace {

constexpr double kLnEps = 1e-5;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

using MatMap = Eigen::Map<Matrix>;
using ConstMatMap = Eigen::Map<const Matrix>;
using RowMap = Eigen::Map<Eigen::RowVectorXd>;
using ConstRowMap = Eigen::Map<const Eigen::RowVectorXd>;

double gelu(double u) { return 0.5 * u * (1.0 + std::erf(u * kInvSqrt2)); }

double gelu_grad(double u) {
  return 0.5 * (1.0 + std::erf(u * kInvSqrt2)) + u * kInvSqrt2Pi * std::exp(-0.5 * u * u);
}

struct Norm {
  Matrix xhat;
  Eigen::VectorXd rstd;
};

Matrix layer_norm(const Matrix &x, const ConstRowMap &g, const ConstRowMap &b, Norm *cache) {
  const Eigen::Index n = x.rows();
  const double d = static_cast<double>(x.cols());
  Matrix xhat(x.rows(), x.cols());
  Eigen::VectorXd rstd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = x.row(i).sum() / d;
    const double var = (x.row(i).array() - mu).square().sum() / d;
    rstd(i) = 1.0 / std::sqrt(var + kLnEps);
    xhat.row(i) = (x.row(i).array() - mu) * rstd(i);
  }
  Matrix y = (xhat.array().rowwise() * g.array()).rowwise() + b.array();
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->rstd = std::move(rstd);
  }
  return y;
}

Matrix layer_norm_backward(const Matrix &dy, const Norm &c, const ConstRowMap &g, RowMap dg,
                           RowMap db) {
  dg += (dy.array() * c.xhat.array()).colwise().sum().matrix();
  db += dy.colwise().sum();
  const Matrix dxhat = dy.array().rowwise() * g.array();
  const double d = static_cast<double>(dy.cols());
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    const double m1 = dxhat.row(i).sum() / d;
    const double m2 = dxhat.row(i).dot(c.xhat.row(i)) / d;
    dx.row(i) = c.rstd(i) * (dxhat.row(i).array() - m1 - c.xhat.row(i).array() * m2);
  }
  return dx;
}

// Inverted dropout mask (entries 0 or 1 / (1 - p)); empty when disabled.
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, std::mt19937_64 *rng) {
  if (rng == nullptr || p <= 0.0)
    return Matrix();
  std::bernoulli_distribution keep(1.0 - p);
  Matrix m(rows, cols);
  const double scale = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = keep(*rng) ? scale : 0.0;
  return m;
}

void apply_mask(Matrix &x, const Matrix &mask) {
  if (mask.size() != 0)
    x.array() *= mask.array();
}

struct LayerCache {
  Norm n1, n2;
  Matrix h1, qkv, y, h2, u, g;
  std::vector<Matrix> probs;      // softmax output per head
  std::vector<Matrix> probs_mask;  // dropout masks per head
  Matrix mask_attn, mask_mlp;
};

}  // namespace

struct Gpt::Trace {
  Matrix mask_embed;
  std::vector<LayerCache> layers;
  Norm nf;
  Matrix hf;
};

void GptConfig::validate() const {
  auto bad = [](const std::string &what) { throw GeneratorError(GeneratorErrc::kBadConfig, what); };
  if (vocab_size < 3)
    bad("vocab_size must be at least 3");
  if (block_size < 1)
    bad("block_size must be positive");
  if (d_model < 1 || n_layers < 1 || n_heads < 1 || d_ff < 1)
    bad("model dimensions must be positive");
  if (d_model % n_heads != 0)
    bad("d_model must be divisible by n_heads");
  if (!(dropout >= 0.0 && dropout < 1.0))
    bad("dropout must be in [0, 1)");
  if (!(init_std > 0.0))
    bad("init_std must be positive");
}

GptConfig GptConfig::desk(int vocab_size, int block_size) {
  GptConfig c;
  c.vocab_size = vocab_size;
  c.block_size = block_size;
  c.d_model = 64;
  c.n_layers = 2;
  c.n_heads = 2;
  c.d_ff = 256;
  return c;
}

nlohmann::json GptConfig::to_json() const {
  return {{"vocab_size", vocab_size}, {"block_size", block_size}, {"d_model", d_model},
          {"n_layers", n_layers},     {"n_heads", n_heads},       {"d_ff", d_ff},
          {"dropout", dropout},       {"init_std", init_std}};
}

GptConfig GptConfig::from_json(const nlohmann::json &j) {
  GptConfig c;
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.block_size = j.value("block_size", c.block_size);
  c.d_model = j.value("d_model", c.d_model);
  c.n_layers = j.value("n_layers", c.n_layers);
  c.n_heads = j.value("n_heads", c.n_heads);
  c.d_ff = j.value("d_ff", c.d_ff);
  c.dropout = j.value("dropout", c.dropout);
  c.init_std = j.value("init_std", c.init_std);
  return c;
}

void Gpt::build_layout() {
  config_.validate();
  const auto v = static_cast<std::size_t>(config_.vocab_size);
  const auto t = static_cast<std::size_t>(config_.context());
  const auto d = static_cast<std::size_t>(config_.d_model);
  const auto f = static_cast<std::size_t>(config_.d_ff);
  std::size_t at = 0;
  auto take = [&at](std::size_t n) {
    const std::size_t o = at;
    at += n;
    return o;
  };
  wte_ = take(v * d);
  wpe_ = take(t * d);
  wtype_ = take(d);
  layers_.clear();
  for (int l = 0; l < config_.n_layers; ++l) {
    LayerOffsets o{};
    o.ln1_g = take(d);
    o.ln1_b = take(d);
    o.w_qkv = take(3 * d * d);
    o.b_qkv = take(3 * d);
    o.w_o = take(d * d);
    o.b_o = take(d);
    o.ln2_g = take(d);
    o.ln2_b = take(d);
    o.w1 = take(f * d);
    o.b1 = take(f);
    o.w2 = take(d * f);
    o.b2 = take(d);
    layers_.push_back(o);
  }
  lnf_g_ = take(d);
  lnf_b_ = take(d);
  w_head_ = take(v * d);
  b_head_ = take(v);
  total_ = at;
}

Gpt::Gpt(const GptConfig &config, std::uint64_t seed) : config_(config) {
  build_layout();
  params_ = Vector::Zero(static_cast<Eigen::Index>(total_));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, config_.init_std);
  auto fill = [&](std::size_t off, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
      params_(static_cast<Eigen::Index>(off + i)) = normal(rng);
  };
  auto ones = [&](std::size_t off, std::size_t n) {
    params_.segment(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(n)).setOnes();
  };
  const auto v = static_cast<std::size_t>(config_.vocab_size);
  const auto t = static_cast<std::size_t>(config_.context());
  const auto d = static_cast<std::size_t>(config_.d_model);
  const auto f = static_cast<std::size_t>(config_.d_ff);
  fill(wte_, v * d);
  fill(wpe_, t * d);
  fill(wtype_, d);
  for (const LayerOffsets &o: layers_) {
    ones(o.ln1_g, d);
    fill(o.w_qkv, 3 * d * d);
    fill(o.w_o, d * d);
    ones(o.ln2_g, d);
    fill(o.w1, f * d);
    fill(o.w2, d * f);
  }
  ones(lnf_g_, d);
  fill(w_head_, v * d);
}

Gpt::Gpt(const GptConfig &config, Vector parameters) : config_(config) {
  build_layout();
  if (static_cast<std::size_t>(parameters.size()) != total_)
    throw GeneratorError(GeneratorErrc::kFormat, "parameter count does not match the config");
  params_ = std::move(parameters);
}

Vector Gpt::decay_mask() const {
  Vector m = Vector::Zero(params_.size());
  const auto v = static_cast<Eigen::Index>(config_.vocab_size);
  const auto d = static_cast<Eigen::Index>(config_.d_model);
  const auto f = static_cast<Eigen::Index>(config_.d_ff);
  auto set = [&m](std::size_t off, Eigen::Index n) { m.segment(static_cast<Eigen::Index>(off), n).setOnes(); };
  for (const LayerOffsets &o: layers_) {
    set(o.w_qkv, 3 * d * d);
    set(o.w_o, d * d);
    set(o.w1, f * d);
    set(o.w2, d * f);
  }
  set(w_head_, v * d);
  return m;
}

Matrix Gpt::forward(std::span<const int> ids) const {
  return forward_full(ids, nullptr, nullptr);
}

double Gpt::loss_and_grad(std::span<const std::vector<int>> batch, Vector *grad,
                          std::mt19937_64 *dropout_rng, std::mt19937_64 *label_rng) const {
  if (grad) {
    if (grad->size() != params_.size())
      *grad = Vector::Zero(params_.size());
    else
      grad->setZero();
  }
  std::size_t targets = 0;
  for (const auto &seq: batch) {
    if (seq.size() > static_cast<std::size_t>(config_.context()))
      throw GeneratorError(GeneratorErrc::kLengthExceeded, "sequence longer than the context");
    if (seq.size() >= 2)
      targets += seq.size() - 1;
  }
  if (targets == 0)
    throw GeneratorError(GeneratorErrc::kEmptyCorpus, "batch has no prediction targets");
  const double weight = 1.0 / static_cast<double>(targets);
  double loss = 0.0;
  for (const auto &seq: batch) {
    if (seq.size() >= 2)
      loss += sequence_loss(seq, weight, grad, dropout_rng, label_rng);
  }
  return loss;
}

Matrix Gpt::forward_full(std::span<const int> ids, std::mt19937_64 *dropout_rng,
                         Trace *trace) const {
  if (ids.size() > static_cast<std::size_t>(config_.context()))
    throw GeneratorError(GeneratorErrc::kLengthExceeded, "sequence longer than the context");
  const auto L = static_cast<Eigen::Index>(ids.size());
  const Eigen::Index d = config_.d_model;
  const Eigen::Index V = config_.vocab_size;
  const Eigen::Index F = config_.d_ff;
  const Eigen::Index H = config_.n_heads;
  const Eigen::Index dh = d / H;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const double p = config_.dropout;
  const double *P = params_.data();
  for (int id: ids) {
    if (id < 0 || id >= config_.vocab_size)
      throw GeneratorError(GeneratorErrc::kBadConfig, "token id outside the vocabulary");
  }
  auto cmat = [P](std::size_t off, Eigen::Index r, Eigen::Index c) { return ConstMatMap(P + off, r, c); };
  auto crow = [P](std::size_t off, Eigen::Index n) { return ConstRowMap(P + off, n); };

  Trace local;
  Trace &tr = trace ? *trace : local;
  const ConstMatMap wte = cmat(wte_, V, d);
  const ConstMatMap wpe = cmat(wpe_, config_.context(), d);
  const ConstRowMap wtype = crow(wtype_, d);
  Matrix x(L, d);
  for (Eigen::Index t = 0; t < L; ++t)
    x.row(t) = wte.row(ids[static_cast<std::size_t>(t)]) + wpe.row(t) + wtype;
  tr.mask_embed = dropout_mask(L, d, p, dropout_rng);
  apply_mask(x, tr.mask_embed);

  tr.layers.assign(layers_.size(), LayerCache());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerOffsets &o = layers_[l];
    LayerCache &c = tr.layers[l];
    c.h1 = layer_norm(x, crow(o.ln1_g, d), crow(o.ln1_b, d), &c.n1);
    c.qkv = c.h1 * cmat(o.w_qkv, 3 * d, d).transpose();
    c.qkv.rowwise() += crow(o.b_qkv, 3 * d);
    c.y = Matrix::Zero(L, d);
    for (Eigen::Index h = 0; h < H; ++h) {
      const auto q = c.qkv.middleCols(h * dh, dh);
      const auto k = c.qkv.middleCols(d + h * dh, dh);
      const auto v = c.qkv.middleCols(2 * d + h * dh, dh);
      Matrix s = (q * k.transpose()) * scale;
      for (Eigen::Index i = 0; i < L; ++i) {
        const double mx = s.row(i).head(i + 1).maxCoeff();
        double z = 0.0;
        for (Eigen::Index j = 0; j <= i; ++j) {
          s(i, j) = std::exp(s(i, j) - mx);
          z += s(i, j);
        }
        s.row(i).head(i + 1) /= z;
        s.row(i).tail(L - i - 1).setZero();
      }
      Matrix pm = dropout_mask(L, L, p, dropout_rng);
      Matrix used = s;
      apply_mask(used, pm);
      c.y.middleCols(h * dh, dh) = used * v;
      c.probs.push_back(std::move(s));
      c.probs_mask.push_back(std::move(pm));
    }
    Matrix a = c.y * cmat(o.w_o, d, d).transpose();
    a.rowwise() += crow(o.b_o, d);
    c.mask_attn = dropout_mask(L, d, p, dropout_rng);
    apply_mask(a, c.mask_attn);
    x += a;

    c.h2 = layer_norm(x, crow(o.ln2_g, d), crow(o.ln2_b, d), &c.n2);
    c.u = c.h2 * cmat(o.w1, F, d).transpose();
    c.u.rowwise() += crow(o.b1, F);
    c.g = c.u.unaryExpr([](double u) { return gelu(u); });
    Matrix m = c.g * cmat(o.w2, d, F).transpose();
    m.rowwise() += crow(o.b2, d);
    c.mask_mlp = dropout_mask(L, d, p, dropout_rng);
    apply_mask(m, c.mask_mlp);
    x += m;
  }
  tr.hf = layer_norm(x, crow(lnf_g_, d), crow(lnf_b_, d), &tr.nf);
  Matrix logits = tr.hf * cmat(w_head_, V, d).transpose();
  logits.rowwise() += crow(b_head_, V);

  return logits;
}

double Gpt::sequence_loss(std::span<const int> ids, double weight, Vector *grad,
                          std::mt19937_64 *dropout_rng, std::mt19937_64 *label_rng) const {
  const auto L = static_cast<Eigen::Index>(ids.size());
  const Eigen::Index d = config_.d_model;
  const Eigen::Index V = config_.vocab_size;
  const Eigen::Index F = config_.d_ff;
  const Eigen::Index H = config_.n_heads;
  const Eigen::Index dh = d / H;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const double *P = params_.data();

  auto cmat = [P](std::size_t off, Eigen::Index r, Eigen::Index c) { return ConstMatMap(P + off, r, c); };
  auto crow = [P](std::size_t off, Eigen::Index n) { return ConstRowMap(P + off, n); };
  Trace tr;
  Matrix logits = forward_full(ids, dropout_rng, grad ? &tr : nullptr);

  // Cross-entropy; logits becomes dlogits in place.
  double loss = 0.0;
  for (Eigen::Index t = 0; t + 1 < L; ++t) {
    auto row = logits.row(t);
    const double mx = row.maxCoeff();
    row = (row.array() - mx).exp();
    row /= row.sum();
    int target = ids[static_cast<std::size_t>(t + 1)];
    if (label_rng) {
      std::discrete_distribution<int> dist(row.data(), row.data() + V);
      target = dist(*label_rng);
    }
    loss -= std::log(std::max(row(target), std::numeric_limits<double>::min())) * weight;
    row(target) -= 1.0;
    row *= weight;
  }
  logits.row(L - 1).setZero();
  if (!grad)
    return loss;

  // Backward.
  double *G = grad->data();
  auto gmat = [G](std::size_t off, Eigen::Index r, Eigen::Index c) { return MatMap(G + off, r, c); };
  auto grow = [G](std::size_t off, Eigen::Index n) { return RowMap(G + off, n); };
  const Matrix &dlogits = logits;
  gmat(w_head_, V, d) += dlogits.transpose() * tr.hf;
  grow(b_head_, V) += dlogits.colwise().sum();
  Matrix dx = layer_norm_backward(dlogits * cmat(w_head_, V, d), tr.nf, crow(lnf_g_, d),
                                  grow(lnf_g_, d), grow(lnf_b_, d));

  for (std::size_t li = layers_.size(); li-- > 0;) {
    const LayerOffsets &o = layers_[li];
    const LayerCache &c = tr.layers[li];

    Matrix dm = dx;
    apply_mask(dm, c.mask_mlp);
    gmat(o.w2, d, F) += dm.transpose() * c.g;
    grow(o.b2, d) += dm.colwise().sum();
    Matrix du = dm * cmat(o.w2, d, F);
    du.array() *= c.u.unaryExpr([](double u) { return gelu_grad(u); }).array();
    gmat(o.w1, F, d) += du.transpose() * c.h2;
    grow(o.b1, F) += du.colwise().sum();
    dx += layer_norm_backward(du * cmat(o.w1, F, d), c.n2, crow(o.ln2_g, d), grow(o.ln2_g, d),
                              grow(o.ln2_b, d));

    Matrix da = dx;
    apply_mask(da, c.mask_attn);
    gmat(o.w_o, d, d) += da.transpose() * c.y;
    grow(o.b_o, d) += da.colwise().sum();
    const Matrix dy = da * cmat(o.w_o, d, d);
    Matrix dqkv = Matrix::Zero(L, 3 * d);
    for (Eigen::Index h = 0; h < H; ++h) {
      const auto q = c.qkv.middleCols(h * dh, dh);
      const auto k = c.qkv.middleCols(d + h * dh, dh);
      const auto v = c.qkv.middleCols(2 * d + h * dh, dh);
      const Matrix &prob = c.probs[static_cast<std::size_t>(h)];
      const Matrix &pm = c.probs_mask[static_cast<std::size_t>(h)];
      Matrix used = prob;
      apply_mask(used, pm);
      const auto dyh = dy.middleCols(h * dh, dh);
      dqkv.middleCols(2 * d + h * dh, dh) += used.transpose() * dyh;
      Matrix dp = dyh * v.transpose();
      apply_mask(dp, pm);
      const Eigen::VectorXd rs = (dp.array() * prob.array()).rowwise().sum();
      Matrix ds = prob.array() * (dp.array().colwise() - rs.array());
      ds *= scale;
      dqkv.middleCols(h * dh, dh) += ds * k;
      dqkv.middleCols(d + h * dh, dh) += ds.transpose() * q;
    }
    gmat(o.w_qkv, 3 * d, d) += dqkv.transpose() * c.h1;
    grow(o.b_qkv, 3 * d) += dqkv.colwise().sum();
    dx += layer_norm_backward(dqkv * cmat(o.w_qkv, 3 * d, d), c.n1, crow(o.ln1_g, d),
                              grow(o.ln1_g, d), grow(o.ln1_b, d));
  }

  apply_mask(dx, tr.mask_embed);
  MatMap dwte = gmat(wte_, V, d);
  MatMap dwpe = gmat(wpe_, config_.context(), d);
  for (Eigen::Index t = 0; t < L; ++t) {
    dwte.row(ids[static_cast<std::size_t>(t)]) += dx.row(t);
    dwpe.row(t) += dx.row(t);
  }
  grow(wtype_, d) += dx.colwise().sum();
  return loss;
}

Gpt::Decoder::Decoder(const Gpt &model) : model_(model) {
  const auto &cfg = model.config();
  for (int l = 0; l < cfg.n_layers; ++l) {
    keys_.emplace_back(cfg.context(), cfg.d_model);
    values_.emplace_back(cfg.context(), cfg.d_model);
  }
}

Eigen::RowVectorXd Gpt::Decoder::step(int token) {
  const GptConfig &cfg = model_.config_;
  if (pos_ >= cfg.context())
    throw GeneratorError(GeneratorErrc::kLengthExceeded, "decoder context is full");
  if (token < 0 || token >= cfg.vocab_size)
    throw GeneratorError(GeneratorErrc::kBadConfig, "token id outside the vocabulary");
  const Eigen::Index d = cfg.d_model;
  const Eigen::Index V = cfg.vocab_size;
  const Eigen::Index F = cfg.d_ff;
  const Eigen::Index H = cfg.n_heads;
  const Eigen::Index dh = d / H;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const double *P = model_.params_.data();
  auto cmat = [P](std::size_t off, Eigen::Index r, Eigen::Index c) { return ConstMatMap(P + off, r, c); };
  auto crow = [P](std::size_t off, Eigen::Index n) { return ConstRowMap(P + off, n); };

  Matrix x = cmat(model_.wte_, V, d).row(token) + cmat(model_.wpe_, cfg.context(), d).row(pos_)
             + crow(model_.wtype_, d);
  for (std::size_t l = 0; l < model_.layers_.size(); ++l) {
    const LayerOffsets &o = model_.layers_[l];
    const Matrix h1 = layer_norm(x, crow(o.ln1_g, d), crow(o.ln1_b, d), nullptr);
    Eigen::RowVectorXd qkv = h1 * cmat(o.w_qkv, 3 * d, d).transpose();
    qkv += crow(o.b_qkv, 3 * d);
    keys_[l].row(pos_) = qkv.segment(d, d);
    values_[l].row(pos_) = qkv.segment(2 * d, d);
    Eigen::RowVectorXd y(d);
    for (Eigen::Index h = 0; h < H; ++h) {
      const auto q = qkv.segment(h * dh, dh);
      const auto k = keys_[l].block(0, h * dh, pos_ + 1, dh);
      const auto v = values_[l].block(0, h * dh, pos_ + 1, dh);
      Eigen::RowVectorXd s = (q * k.transpose()) * scale;
      s = (s.array() - s.maxCoeff()).exp();
      s /= s.sum();
      y.segment(h * dh, dh) = s * v;
    }
    Eigen::RowVectorXd a = y * cmat(o.w_o, d, d).transpose();
    x.row(0) += a + crow(o.b_o, d);
    const Matrix h2 = layer_norm(x, crow(o.ln2_g, d), crow(o.ln2_b, d), nullptr);
    Eigen::RowVectorXd u = h2 * cmat(o.w1, F, d).transpose();
    u += crow(o.b1, F);
    u = u.unaryExpr([](double z) { return gelu(z); });
    Eigen::RowVectorXd m = u * cmat(o.w2, d, F).transpose();
    x.row(0) += m + crow(o.b2, d);
  }
  const Matrix hf = layer_norm(x, crow(model_.lnf_g_, d), crow(model_.lnf_b_, d), nullptr);
  Eigen::RowVectorXd logits = hf * cmat(model_.w_head_, V, d).transpose();
  logits += crow(model_.b_head_, V);
  ++pos_;
  return logits;
}

}  // namespace molal
