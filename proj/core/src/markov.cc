// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "molal/generator.h"
#include "molal/io.h"

namespace molal {

MarkovModel::MarkovModel(Vocabulary vocab, int order, double pseudo_count, int block_size)
    : vocab_(std::move(vocab)), order_(order), alpha_(pseudo_count), block_size_(block_size),
      tables_(static_cast<std::size_t>(std::max(order, 0))) {
  if (order < 1)
    throw GeneratorError(GeneratorErrc::kBadConfig, "Markov order must be at least 1");
  if (!(pseudo_count >= 0.0) || !std::isfinite(pseudo_count))
    throw GeneratorError(GeneratorErrc::kBadConfig, "pseudo-count must be non-negative");
  if (block_size < 1)
    throw GeneratorError(GeneratorErrc::kBadConfig, "block_size must be positive");
}

std::string MarkovModel::key(std::span<const int> prefix, int length) const {
  std::string k;
  k.reserve(static_cast<std::size_t>(length) * 2);
  const auto n = static_cast<int>(prefix.size());
  for (int i = n - length; i < n; ++i) {
    const int id = i < 0 ? vocab_.start_id() : prefix[static_cast<std::size_t>(i)];
    k += static_cast<char>(id & 0xff);
    k += static_cast<char>((id >> 8) & 0xff);
  }
  return k;
}

std::vector<MarkovModel::Table> MarkovModel::count_transitions(
    std::span<const std::vector<int>> sequences, double *total) const {
  std::vector<Table> tables(static_cast<std::size_t>(order_));
  const auto v = static_cast<std::size_t>(vocab_.size());
  *total = 0.0;
  std::vector<int> seq;
  for (const auto &body: sequences) {
    seq.assign(1, vocab_.start_id());
    seq.insert(seq.end(), body.begin(), body.end());
    seq.push_back(vocab_.end_id());
    for (std::size_t t = 1; t < seq.size(); ++t) {
      const int next = seq[t];
      if (next < 0 || next >= vocab_.size())
        throw GeneratorError(GeneratorErrc::kBadConfig, "token id outside the vocabulary");
      const std::span<const int> prefix(seq.data(), t);
      for (int m = 1; m <= order_; ++m) {
        auto &row = tables[static_cast<std::size_t>(m - 1)][key(prefix, m)];
        if (row.empty())
          row.assign(v, 0.0);
        row[static_cast<std::size_t>(next)] += 1.0;
      }
      *total += 1.0;
    }
  }
  return tables;
}

MarkovModel MarkovModel::fit(std::span<const std::vector<int>> sequences, const Vocabulary &vocab,
                             int order, double pseudo_count, int block_size) {
  if (sequences.empty())
    throw GeneratorError(GeneratorErrc::kEmptyCorpus, "cannot fit a Markov model to no data");
  MarkovModel m(vocab, order, pseudo_count, block_size);
  m.tables_ = m.count_transitions(sequences, &m.total_);
  return m;
}

void MarkovModel::fine_tune(std::span<const std::vector<int>> sequences, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0))
    throw GeneratorError(GeneratorErrc::kBadConfig, "fine-tune weight must be in [0, 1]");
  if (sequences.empty())
    throw GeneratorError(GeneratorErrc::kEmptyCorpus, "no fine-tuning data");
  double total_new = 0.0;
  auto fresh = count_transitions(sequences, &total_new);
  const double keep = 1.0 - weight;
  const double add = weight * total_ / total_new;
  for (std::size_t m = 0; m < tables_.size(); ++m) {
    if (keep == 0.0)
      tables_[m].clear();
    for (auto &[k, row]: tables_[m])
      for (double &c: row)
        c *= keep;
    for (auto &[k, row]: fresh[m]) {
      auto &dst = tables_[m][k];
      if (dst.empty())
        dst.assign(row.size(), 0.0);
      for (std::size_t i = 0; i < row.size(); ++i)
        dst[i] += add * row[i];
    }
  }
}

std::vector<double> MarkovModel::distribution(std::span<const int> prefix) const {
  const auto v = static_cast<std::size_t>(vocab_.size());
  const std::vector<double> *row = nullptr;
  for (int m = order_; m >= 1 && row == nullptr; --m) {
    const auto &table = tables_[static_cast<std::size_t>(m - 1)];
    auto it = table.find(key(prefix, m));
    if (it != table.end())
      row = &it->second;
  }
  std::vector<double> p(v, 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < v; ++i) {
    const int id = static_cast<int>(i);
    if (id == vocab_.start_id() || id == vocab_.pad_id())
      continue;
    p[i] = (row ? (*row)[i] : 0.0) + alpha_;
    z += p[i];
  }
  if (z <= 0.0) {
    for (std::size_t i = 0; i < v; ++i) {
      const int id = static_cast<int>(i);
      p[i] = (id == vocab_.start_id() || id == vocab_.pad_id()) ? 0.0 : 1.0;
      z += p[i];
    }
  }
  for (double &x: p)
    x /= z;
  return p;
}

std::vector<int> MarkovModel::sample(std::mt19937_64 &rng, double temperature) const {
  std::vector<int> prefix{vocab_.start_id()};
  std::vector<double> logits;
  while (static_cast<int>(prefix.size()) - 1 < block_size_) {
    const auto p = distribution(prefix);
    logits.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      logits[i] = p[i] > 0.0 ? std::log(p[i]) : -INFINITY;
    const int next = sample_token(logits, temperature, rng);
    if (next == vocab_.end_id())
      break;
    prefix.push_back(next);
  }
  return {prefix.begin() + 1, prefix.end()};
}

nlohmann::json MarkovModel::to_json() const {
  nlohmann::json tables = nlohmann::json::array();
  for (std::size_t m = 0; m < tables_.size(); ++m) {
    // Sorted keys keep the file byte-identical across runs.
    std::vector<const Table::value_type *> entries;
    for (const auto &e: tables_[m])
      entries.push_back(&e);
    std::sort(entries.begin(), entries.end(),
              [](const auto *a, const auto *b) { return a->first < b->first; });
    nlohmann::json rows = nlohmann::json::array();
    for (const auto *e: entries) {
      std::vector<int> ctx;
      for (std::size_t i = 0; i + 1 < e->first.size(); i += 2)
        ctx.push_back(static_cast<unsigned char>(e->first[i])
                      | (static_cast<unsigned char>(e->first[i + 1]) << 8));
      nlohmann::json counts = nlohmann::json::array();
      for (std::size_t t = 0; t < e->second.size(); ++t) {
        if (e->second[t] != 0.0)
          counts.push_back({t, e->second[t]});
      }
      rows.push_back({{"context", ctx}, {"counts", counts}});
    }
    tables.push_back(rows);
  }
  return {
    {"format", "molal-markov"},
    {"version", 1},
    {"order", order_},
    {"pseudo_count", alpha_},
    {"block_size", block_size_},
    {"total", total_},
    {"vocabulary", vocab_.tokens()},
    {"vocabulary_hash", vocab_.hash()},
    {"tables", tables},
  };
}

MarkovModel MarkovModel::from_json(const nlohmann::json &j) {
  try {
    if (j.at("format") != "molal-markov" || j.at("version").get<int>() != 1)
      throw GeneratorError(GeneratorErrc::kFormat, "not a version 1 Markov checkpoint");
    Vocabulary vocab(j.at("vocabulary").get<std::vector<std::string>>());
    if (vocab.hash() != j.at("vocabulary_hash").get<std::uint64_t>())
      throw GeneratorError(GeneratorErrc::kVocabularyMismatch, "vocabulary hash mismatch");
    MarkovModel m(vocab, j.at("order").get<int>(), j.at("pseudo_count").get<double>(),
                  j.at("block_size").get<int>());
    m.total_ = j.at("total").get<double>();
    const auto &tables = j.at("tables");
    if (tables.size() != static_cast<std::size_t>(m.order_))
      throw GeneratorError(GeneratorErrc::kFormat, "table count does not match the order");
    for (std::size_t t = 0; t < tables.size(); ++t) {
      for (const auto &row: tables[t]) {
        const auto ctx = row.at("context").get<std::vector<int>>();
        std::vector<double> counts(static_cast<std::size_t>(vocab.size()), 0.0);
        for (const auto &c: row.at("counts")) {
          const auto id = c.at(0).get<std::size_t>();
          if (id >= counts.size())
            throw GeneratorError(GeneratorErrc::kFormat, "token id outside the vocabulary");
          counts[id] = c.at(1).get<double>();
        }
        m.tables_[t][m.key(ctx, static_cast<int>(ctx.size()))] = std::move(counts);
      }
    }
    return m;
  } catch (const nlohmann::json::exception &e) {
    throw GeneratorError(GeneratorErrc::kFormat, std::string("malformed Markov checkpoint: ") + e.what());
  }
}

void MarkovModel::save(const std::filesystem::path &path) const {
  write_file(path, to_json().dump());
}

}  // namespace molal
