// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/generator.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "molal/io.h"

namespace molal {
namespace {

constexpr char kGptMagic[8] = {'M', 'O', 'L', 'G', 'P', 'T', '0', '1'};

std::vector<int> strip_framing(const FramedSequence &seq, const Vocabulary &vocab) {
  const auto end = std::find(seq.ids.begin(), seq.ids.end(), vocab.end_id());
  return {seq.ids.begin(), end == seq.ids.end() ? end : end + 1};
}

}  // namespace

int sample_token(std::span<const double> logits, double temperature, std::mt19937_64 &rng) {
  if (logits.empty())
    throw GeneratorError(GeneratorErrc::kBadConfig, "empty distribution");
  if (temperature <= 0.0)
    return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> w(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i)
    w[i] = std::isfinite(logits[i]) ? std::exp((logits[i] - mx) / temperature) : 0.0;
  std::discrete_distribution<int> dist(w.begin(), w.end());
  return dist(rng);
}

GptModel::GptModel(Vocabulary vocab, Gpt gpt) : vocab_(std::move(vocab)), gpt_(std::move(gpt)) {
  if (gpt_.config().vocab_size != vocab_.size())
    throw GeneratorError(GeneratorErrc::kVocabularyMismatch,
                         "model vocabulary size differs from the vocabulary");
}

std::vector<int> GptModel::sample(std::mt19937_64 &rng, double temperature) const {
  Gpt::Decoder dec(gpt_);
  std::vector<int> out;
  int token = vocab_.start_id();
  while (static_cast<int>(out.size()) < block_size()) {
    Eigen::RowVectorXd logits = dec.step(token);
    logits(vocab_.start_id()) = -INFINITY;
    logits(vocab_.pad_id()) = -INFINITY;
    token = sample_token(std::span<const double>(logits.data(), static_cast<std::size_t>(logits.size())),
                         temperature, rng);
    if (token == vocab_.end_id())
      break;
    out.push_back(token);
  }
  return out;
}

void GptModel::save(const std::filesystem::path &path) const {
  const nlohmann::json header = {
    {"format", "molal-gpt"},
    {"version", 1},
    {"config", gpt_.config().to_json()},
    {"vocabulary", vocab_.tokens()},
    {"vocabulary_hash", vocab_.hash()},
  };
  const std::string text = header.dump();
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(kGptMagic, sizeof kGptMagic);
  const auto len = static_cast<std::uint64_t>(text.size());
  out.write(reinterpret_cast<const char *>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  const auto n = static_cast<std::uint64_t>(gpt_.num_parameters());
  out.write(reinterpret_cast<const char *>(&n), sizeof n);
  out.write(reinterpret_cast<const char *>(gpt_.parameters().data()),
            static_cast<std::streamsize>(n * sizeof(double)));
  if (!out)
    throw IoError("write to '" + path.string() + "' failed");
}

std::unique_ptr<SequenceModel> load_model(const std::filesystem::path &path) {
  const std::string bytes = read_file(path);
  if (bytes.size() >= sizeof kGptMagic && std::memcmp(bytes.data(), kGptMagic, sizeof kGptMagic) == 0) {
    std::size_t at = sizeof kGptMagic;
    auto need = [&](std::size_t n) {
      if (bytes.size() - at < n)
        throw GeneratorError(GeneratorErrc::kFormat, path.string() + ": truncated checkpoint");
    };
    std::uint64_t len = 0;
    need(sizeof len);
    std::memcpy(&len, bytes.data() + at, sizeof len);
    at += sizeof len;
    need(len);
    nlohmann::json header;
    try {
      header = nlohmann::json::parse(bytes.substr(at, len));
    } catch (const nlohmann::json::exception &e) {
      throw GeneratorError(GeneratorErrc::kFormat, path.string() + ": " + e.what());
    }
    at += len;
    Vocabulary vocab(header.at("vocabulary").get<std::vector<std::string>>());
    if (vocab.hash() != header.at("vocabulary_hash").get<std::uint64_t>())
      throw GeneratorError(GeneratorErrc::kVocabularyMismatch, "vocabulary hash mismatch");
    const GptConfig cfg = GptConfig::from_json(header.at("config"));
    std::uint64_t n = 0;
    need(sizeof n);
    std::memcpy(&n, bytes.data() + at, sizeof n);
    at += sizeof n;
    need(n * sizeof(double));
    Vector params(static_cast<Eigen::Index>(n));
    std::memcpy(params.data(), bytes.data() + at, n * sizeof(double));
    return std::make_unique<GptModel>(std::move(vocab), Gpt(cfg, std::move(params)));
  }
  try {
    return std::make_unique<MarkovModel>(MarkovModel::from_json(nlohmann::json::parse(bytes)));
  } catch (const nlohmann::json::parse_error &) {
    throw GeneratorError(GeneratorErrc::kFormat, path.string() + " is not a model checkpoint");
  }
}

TrainResult train(Gpt &model, std::span<const FramedSequence> corpus, const Vocabulary &vocab,
                  const TrainOptions &options) {
  options.schedule.validate();
  if (vocab.size() != model.config().vocab_size)
    throw GeneratorError(GeneratorErrc::kVocabularyMismatch, "vocabulary does not match the model");
  std::vector<std::vector<int>> seqs;
  for (const FramedSequence &f: corpus) {
    auto s = strip_framing(f, vocab);
    if (s.size() >= 2)
      seqs.push_back(std::move(s));
  }
  if (seqs.empty())
    throw GeneratorError(GeneratorErrc::kEmptyCorpus, "training corpus is empty");

  std::mt19937_64 rng(options.seed);
  std::vector<std::vector<std::size_t>> batches;
  std::vector<std::size_t> batch_tokens;
  std::vector<std::size_t> order(seqs.size());
  const auto bs = static_cast<std::size_t>(options.schedule.batch_size);
  for (int e = 0; e < options.schedule.epochs; ++e) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < order.size(); b += bs) {
      std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(b),
                                     order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), b + bs)));
      std::size_t tokens = 0;
      for (std::size_t i: batch)
        tokens += seqs[i].size() - 1;
      batches.push_back(std::move(batch));
      batch_tokens.push_back(tokens);
    }
  }
  TrainResult result;
  if (batches.empty())
    return result;

  const double before_final = static_cast<double>(
      std::accumulate(batch_tokens.begin(), batch_tokens.end() - 1, std::size_t{0}));
  OptimizerConfig ocfg = options.optimizer;
  ocfg.tokens_per_batch = static_cast<double>(
      std::accumulate(batch_tokens.begin(), batch_tokens.end(), std::size_t{0}))
      / static_cast<double>(batch_tokens.size());
  auto optimizer = make_optimizer(ocfg, model.decay_mask());
  std::mt19937_64 dropout_rng(rng());
  std::mt19937_64 label_rng(rng());

  Vector grad;
  double seen = 0.0;
  std::vector<std::vector<int>> batch;
  for (std::size_t s = 0; s < batches.size(); ++s) {
    batch.clear();
    for (std::size_t i: batches[s])
      batch.push_back(seqs[i]);
    const double u = before_final > 0.0 ? seen / before_final : 0.0;
    const double lr = learning_rate(options.schedule, u);
    const auto step = static_cast<long>(s);
    if (optimizer->wants_hessian(step)) {
      Vector sampled;
      model.loss_and_grad(batch, &sampled, nullptr, &label_rng);
      optimizer->update_hessian(sampled);
    }
    const double loss = model.loss_and_grad(batch, &grad, &dropout_rng);
    if (!std::isfinite(loss))
      throw GeneratorError(GeneratorErrc::kNonFiniteLoss,
                           "non-finite loss at step " + std::to_string(step) + " (lr "
                               + std::to_string(lr) + ")");
    const double norm = clip_grad_norm(grad, options.grad_clip);
    if (!std::isfinite(norm))
      throw GeneratorError(GeneratorErrc::kNonFiniteLoss,
                           "non-finite gradient at step " + std::to_string(step));
    optimizer->step(model.parameters(), grad, lr);
    result.trace.push_back({step, lr, loss, norm, grad.norm(), batch_tokens[s]});
    seen += static_cast<double>(batch_tokens[s]);
    if (options.max_steps > 0 && step + 1 >= options.max_steps)
      break;
  }
  return result;
}

void write_loss_trace(const std::filesystem::path &path, const TrainResult &result) {
  std::ostringstream out;
  out.precision(10);
  out << "step,lr,loss,grad_norm,clipped_norm,tokens\n";
  for (const TrainStep &s: result.trace)
    out << s.step << ',' << s.lr << ',' << s.loss << ',' << s.grad_norm << ',' << s.clipped_norm
        << ',' << s.tokens << '\n';
  write_file(path, out.str());
}

nlohmann::json GenerationStats::to_json() const {
  const auto frac = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  return {{"attempts", attempts},
          {"valid", valid},
          {"duplicates", duplicates},
          {"filtered", filtered},
          {"unique", unique},
          {"validity", frac(valid, attempts)},
          {"uniqueness", frac(valid - duplicates, valid)}};
}

GenerationResult generate_unique(const SequenceModel &model, const GenerationRequest &request,
                                 const CandidateFilter &filter, std::mt19937_64 &rng) {
  if (request.target < 1)
    throw ValidationError("generation target must be at least 1");
  const std::size_t max_attempts =
      request.max_attempts > 0 ? request.max_attempts : 20 * request.target;
  GenerationResult out;
  std::unordered_set<std::string> seen;
  while (out.molecules.size() < request.target && out.stats.attempts < max_attempts) {
    const std::vector<int> ids = model.sample(rng, request.temperature);
    ++out.stats.attempts;
    Molecule mol;
    try {
      mol = parse_smiles(detokenize(ids, model.vocabulary()));
    } catch (const SmilesError &) {
      continue;
    }
    ++out.stats.valid;
    std::string canon = canonical_string(mol);
    if (!seen.insert(canon).second) {
      ++out.stats.duplicates;
      continue;
    }
    if (filter && filter(mol)) {
      ++out.stats.filtered;
      continue;
    }
    out.molecules.push_back(std::move(canon));
  }
  out.stats.unique = out.molecules.size();
  out.target_unreachable = out.molecules.size() < request.target;
  return out;
}

}  // namespace molal
