// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_SCORING_H_
#define MOLAL_SCORING_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "molal/descriptors.h"
#include "molal/error.h"
#include "molal/proxy.h"

namespace molal {

enum class Interaction {
  kHydrophobic,
  kHbond,
  kIonic,
  kCationPi,
  kVdw,
  kHalogenBond,
  kPiFace,
  kPiEdge,
  kMetallic,
};

inline constexpr int kInteractionCount = 9;

std::string_view interaction_name(Interaction t);

// Canonical names plus the aliases used by common interaction tables
// (e.g. "HBDonor", "MetalAcceptor", "XBDonor", "EdgeToFace").
std::optional<Interaction> interaction_from_name(std::string_view name);

struct InteractionFingerprint {
  std::array<std::int64_t, kInteractionCount> counts{};

  std::int64_t &operator[](Interaction t) { return counts[static_cast<std::size_t>(t)]; }
  std::int64_t operator[](Interaction t) const { return counts[static_cast<std::size_t>(t)]; }

  friend InteractionFingerprint operator+(const InteractionFingerprint &a,
                                          const InteractionFingerprint &b) {
    InteractionFingerprint r;
    for (std::size_t i = 0; i < r.counts.size(); ++i)
      r.counts[i] = a.counts[i] + b.counts[i];
    return r;
  }
  friend bool operator==(const InteractionFingerprint &, const InteractionFingerprint &) = default;
};

class WeightTable {
 public:
  // hydrophobic 2.5, hbond 3.5, ionic 7.5, cation_pi 2.5, vdw 1.0,
  // halogen_bond 3.0, pi_face 3.0, pi_edge 1.0, metallic 3.0
  WeightTable();
  explicit WeightTable(const std::array<double, kInteractionCount> &weights);

  double operator[](Interaction t) const { return w_[static_cast<std::size_t>(t)]; }
  const std::array<double, kInteractionCount> &weights() const { return w_; }
  WeightTable scaled(double c) const;

  // Object with all nine canonical names.
  static WeightTable from_json(const nlohmann::json &j);
  nlohmann::json to_json() const;

 private:
  std::array<double, kInteractionCount> w_;
};

double score(const InteractionFingerprint &fp, const WeightTable &w);

struct ScoreThreshold {
  double value = 0.0;
  std::string note;
};

inline constexpr double kAblThreshold = 37.0;
inline constexpr double kHnhThreshold = 11.0;

struct ScoreRecord {
  std::string smiles;  // canonical
  int cluster = -1;
  std::optional<InteractionFingerprint> fingerprint;
  double score = 0.0;
};

enum class ScoringErrc {
  kUnknownColumn,
  kNegativeCount,
  kUnparseableSmiles,
  kDegenerateVariance,
  kMissingScore,
  kBadArgument,
};

using ScoringError = CodedError<ScoringErrc>;

struct FingerprintIngest {
  std::vector<ScoreRecord> records;  // one per canonical SMILES
  std::vector<RejectedRow> rejects;
  std::vector<std::string> collisions;  // canonical keys seen more than once
};

// CSV "smiles,<type>,...". Every non-smiles column must name an
// interaction type; columns aliasing the same type are summed. Rows with
// unparseable SMILES or negative / non-integer counts are rejected.
// Duplicate keys keep the highest score.
FingerprintIngest ingest_fingerprints(std::istream &in, const WeightTable &w = {});
FingerprintIngest ingest_fingerprints(const std::filesystem::path &path, const WeightTable &w = {});

struct OracleConfig {
  double base = 0.0;
  double amplitude = 40.0;
  double sigma = 1.5;
  // Peak position over the first target.size() proxy coordinates.
  std::vector<double> target;
  // Optional linear term over the leading coordinates.
  std::vector<double> trend;

  nlohmann::json to_json() const;
  static OracleConfig from_json(const nlohmann::json &j);
};

// max(0, base + amplitude * exp(-|p - target|^2 / (2 sigma^2)) + trend . p),
// using the leading coordinates only.
double synthetic_oracle(const ProxyPoint &p, const OracleConfig &cfg);

class ScoreSource {
 public:
  virtual ~ScoreSource() = default;
  virtual std::string name() const = 0;
  // Canonical SMILES and its proxy point.
  virtual double score(const std::string &smiles, const ProxyPoint &point) const = 0;
};

class OracleScoreSource : public ScoreSource {
 public:
  explicit OracleScoreSource(OracleConfig cfg) : cfg_(std::move(cfg)) { }
  std::string name() const override { return "oracle"; }
  double score(const std::string &smiles, const ProxyPoint &point) const override;
  const OracleConfig &config() const { return cfg_; }

 private:
  OracleConfig cfg_;
};

// Looks scores up from ingested records; unknown molecules throw
// kMissingScore.
class TableScoreSource : public ScoreSource {
 public:
  explicit TableScoreSource(std::span<const ScoreRecord> records);
  std::string name() const override { return "table"; }
  double score(const std::string &smiles, const ProxyPoint &point) const override;
  std::size_t size() const { return scores_.size(); }

 private:
  std::map<std::string, double> scores_;
};

struct ScoreEvaluation {
  double pearson = 0.0;
  double fraction_at_or_above = 0.0;
  std::size_t n = 0;
};

ScoreEvaluation evaluate_scores(std::span<const double> scores, std::span<const double> labels,
                                double threshold);

// "smiles,pKd" -> canonical SMILES -> label.
std::map<std::string, double> read_affinities(const std::filesystem::path &path);

void write_score_records(const std::filesystem::path &path, std::span<const ScoreRecord> records);
std::vector<ScoreRecord> read_score_records(const std::filesystem::path &path);

}  // namespace molal

#endif  // MOLAL_SCORING_H_
