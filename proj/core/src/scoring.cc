// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/scoring.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "molal/io.h"
#include "molal/smiles.h"
#include "molal/stats.h"

namespace molal {
namespace {

constexpr std::array<std::string_view, kInteractionCount> kNames = {
  "hydrophobic", "hbond", "ionic", "cation_pi", "vdw", "halogen_bond", "pi_face", "pi_edge",
  "metallic",
};

struct Alias {
  std::string_view name;
  Interaction type;
};

constexpr Alias kAliases[] = {
  {"Hydrophobic", Interaction::kHydrophobic},
  {"HBDonor", Interaction::kHbond},
  {"HBAcceptor", Interaction::kHbond},
  {"Hydrogen-bond", Interaction::kHbond},
  {"Anionic", Interaction::kIonic},
  {"Cationic", Interaction::kIonic},
  {"CationPi", Interaction::kCationPi},
  {"PiCation", Interaction::kCationPi},
  {"VdWContact", Interaction::kVdw},
  {"Van der Waals", Interaction::kVdw},
  {"XBDonor", Interaction::kHalogenBond},
  {"XBAcceptor", Interaction::kHalogenBond},
  {"FaceToFace", Interaction::kPiFace},
  {"EdgeToFace", Interaction::kPiEdge},
  {"MetalAcceptor", Interaction::kMetallic},
  {"MetalDonor", Interaction::kMetallic},
};

std::optional<std::int64_t> parse_count(std::string_view s) {
  while (!s.empty() && s.front() == ' ')
    s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ')
    s.remove_suffix(1);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    return std::nullopt;
  return v;
}

}  // namespace

std::string_view interaction_name(Interaction t) {
  return kNames[static_cast<std::size_t>(t)];
}

std::optional<Interaction> interaction_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name)
      return static_cast<Interaction>(i);
  }
  for (const Alias &a: kAliases) {
    if (a.name == name)
      return a.type;
  }
  return std::nullopt;
}

WeightTable::WeightTable() : w_{2.5, 3.5, 7.5, 2.5, 1.0, 3.0, 3.0, 1.0, 3.0} { }

WeightTable::WeightTable(const std::array<double, kInteractionCount> &weights) : w_(weights) {
  for (double v: w_) {
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError("interaction weights must be finite and non-negative");
  }
}

WeightTable WeightTable::scaled(double c) const {
  auto w = w_;
  for (double &v: w)
    v *= c;
  return WeightTable(w);
}

WeightTable WeightTable::from_json(const nlohmann::json &j) {
  if (!j.is_object())
    throw ValidationError("weight table must be a JSON object");
  std::array<double, kInteractionCount> w{};
  std::array<bool, kInteractionCount> seen{};
  for (const auto &[key, value]: j.items()) {
    std::size_t i = 0;
    while (i < kNames.size() && kNames[i] != key)
      ++i;
    if (i == kNames.size())
      throw ValidationError("unknown interaction type '" + key + "' in weight table");
    if (!value.is_number())
      throw ValidationError("weight for '" + key + "' is not a number");
    w[i] = value.get<double>();
    seen[i] = true;
  }
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (!seen[i])
      throw ValidationError("weight table lacks '" + std::string(kNames[i]) + "'");
  }
  return WeightTable(w);
}

nlohmann::json WeightTable::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < kNames.size(); ++i)
    j[std::string(kNames[i])] = w_[i];
  return j;
}

double score(const InteractionFingerprint &fp, const WeightTable &w) {
  double s = 0.0;
  for (std::size_t i = 0; i < fp.counts.size(); ++i)
    s += static_cast<double>(fp.counts[i]) * w.weights()[i];
  return s;
}

FingerprintIngest ingest_fingerprints(std::istream &in, const WeightTable &w) {
  const CsvTable csv = read_csv(in);
  if (csv.header.empty() || csv.header.front() != "smiles")
    throw ScoringError(ScoringErrc::kUnknownColumn, "first column must be 'smiles'");
  std::vector<Interaction> column_type;
  for (std::size_t c = 1; c < csv.header.size(); ++c) {
    const auto t = interaction_from_name(csv.header[c]);
    if (!t)
      throw ScoringError(ScoringErrc::kUnknownColumn,
                         "unknown interaction column '" + csv.header[c] + "'");
    column_type.push_back(*t);
  }

  FingerprintIngest out;
  std::map<std::string, std::size_t> index;
  for (const CsvRow &row: csv.rows) {
    const std::string smiles = row.fields.empty() ? std::string() : row.fields.front();
    if (row.fields.size() != csv.header.size()) {
      out.rejects.push_back({row.line, smiles, "wrong column count"});
      continue;
    }
    std::string key;
    try {
      key = canonicalize(smiles);
    } catch (const SmilesError &e) {
      out.rejects.push_back({row.line, smiles, std::string("unparseable SMILES: ") + e.what()});
      continue;
    }
    InteractionFingerprint fp;
    std::string problem;
    for (std::size_t c = 1; c < row.fields.size(); ++c) {
      const auto v = parse_count(row.fields[c]);
      if (!v) {
        problem = "column '" + csv.header[c] + "' is not an integer count";
        break;
      }
      if (*v < 0) {
        problem = "negative count in column '" + csv.header[c] + "'";
        break;
      }
      fp[column_type[c - 1]] += *v;
    }
    if (!problem.empty()) {
      out.rejects.push_back({row.line, smiles, problem});
      continue;
    }
    ScoreRecord rec{key, -1, fp, score(fp, w)};
    auto [it, inserted] = index.emplace(key, out.records.size());
    if (inserted) {
      out.records.push_back(std::move(rec));
    } else {
      out.collisions.push_back(key);
      ScoreRecord &prev = out.records[it->second];
      if (rec.score > prev.score)
        prev = std::move(rec);
    }
  }
  return out;
}

FingerprintIngest ingest_fingerprints(const std::filesystem::path &path, const WeightTable &w) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open '" + path.string() + "'");
  return ingest_fingerprints(in, w);
}

nlohmann::json OracleConfig::to_json() const {
  return {{"base", base}, {"amplitude", amplitude}, {"sigma", sigma},
          {"target", target}, {"trend", trend}};
}

OracleConfig OracleConfig::from_json(const nlohmann::json &j) {
  OracleConfig c;
  c.base = j.value("base", c.base);
  c.amplitude = j.value("amplitude", c.amplitude);
  c.sigma = j.value("sigma", c.sigma);
  c.target = j.value("target", c.target);
  c.trend = j.value("trend", c.trend);
  if (!(c.sigma > 0.0) || !std::isfinite(c.base) || !std::isfinite(c.amplitude))
    throw ValidationError("oracle needs finite base/amplitude and sigma > 0");
  return c;
}

double synthetic_oracle(const ProxyPoint &p, const OracleConfig &cfg) {
  const auto dims = static_cast<Eigen::Index>(cfg.target.size());
  if (p.size() < dims || p.size() < static_cast<Eigen::Index>(cfg.trend.size()))
    throw ScoringError(ScoringErrc::kBadArgument, "proxy point has fewer dimensions than the oracle");
  if (!p.allFinite())
    throw ScoringError(ScoringErrc::kBadArgument, "proxy point is not finite");
  double d2 = 0.0;
  for (Eigen::Index i = 0; i < dims; ++i) {
    const double d = p(i) - cfg.target[static_cast<std::size_t>(i)];
    d2 += d * d;
  }
  double s = cfg.base + cfg.amplitude * std::exp(-d2 / (2.0 * cfg.sigma * cfg.sigma));
  for (std::size_t i = 0; i < cfg.trend.size(); ++i)
    s += cfg.trend[i] * p(static_cast<Eigen::Index>(i));
  return std::max(0.0, s);
}

double OracleScoreSource::score(const std::string &, const ProxyPoint &point) const {
  return synthetic_oracle(point, cfg_);
}

TableScoreSource::TableScoreSource(std::span<const ScoreRecord> records) {
  for (const ScoreRecord &r: records) {
    auto [it, inserted] = scores_.emplace(r.smiles, r.score);
    if (!inserted)
      it->second = std::max(it->second, r.score);
  }
}

double TableScoreSource::score(const std::string &smiles, const ProxyPoint &) const {
  auto it = scores_.find(smiles);
  if (it == scores_.end())
    throw ScoringError(ScoringErrc::kMissingScore, "no score available for '" + smiles + "'");
  return it->second;
}

ScoreEvaluation evaluate_scores(std::span<const double> scores, std::span<const double> labels,
                                double threshold) {
  if (scores.size() != labels.size())
    throw ScoringError(ScoringErrc::kBadArgument, "scores and labels differ in length");
  if (scores.size() < 2)
    throw ScoringError(ScoringErrc::kDegenerateVariance, "need at least two pairs");
  const double r = stats::pearson(scores, labels);
  if (std::isnan(r))
    throw ScoringError(ScoringErrc::kDegenerateVariance, "scores or labels have zero variance");
  const auto above = std::count_if(scores.begin(), scores.end(),
                                   [threshold](double s) { return s >= threshold; });
  return {r, static_cast<double>(above) / static_cast<double>(scores.size()), scores.size()};
}

std::map<std::string, double> read_affinities(const std::filesystem::path &path) {
  const CsvTable csv = read_csv(path);
  if (csv.header.size() < 2 || csv.header[0] != "smiles")
    throw ValidationError(path.string() + ": expected header 'smiles,pKd'");
  std::map<std::string, double> out;
  for (const CsvRow &row: csv.rows) {
    if (row.fields.size() < 2)
      continue;
    const auto label = parse_double(row.fields[1]);
    if (!label || !std::isfinite(*label))
      continue;
    try {
      out[canonicalize(row.fields[0])] = *label;
    } catch (const SmilesError &) {
      continue;
    }
  }
  return out;
}

void write_score_records(const std::filesystem::path &path, std::span<const ScoreRecord> records) {
  std::ostringstream out;
  out.precision(17);
  out << "smiles,cluster,score\n";
  for (const ScoreRecord &r: records)
    out << csv_field(r.smiles) << ',' << r.cluster << ',' << r.score << '\n';
  write_file(path, out.str());
}

std::vector<ScoreRecord> read_score_records(const std::filesystem::path &path) {
  const CsvTable csv = read_csv(path);
  if (csv.header != std::vector<std::string>{"smiles", "cluster", "score"})
    throw ValidationError(path.string() + ": expected header 'smiles,cluster,score'");
  std::vector<ScoreRecord> out;
  for (const CsvRow &row: csv.rows) {
    if (row.fields.size() != 3)
      throw ValidationError(path.string() + ": line " + std::to_string(row.line) + " is malformed");
    const auto cluster = parse_integer(row.fields[1]);
    const auto value = parse_double(row.fields[2]);
    if (!cluster || !value)
      throw ValidationError(path.string() + ": line " + std::to_string(row.line) + " is malformed");
    out.push_back({row.fields[0], static_cast<int>(*cluster), std::nullopt, *value});
  }
  return out;
}

}  // namespace molal
