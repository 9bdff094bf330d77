// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/metrics.h"

#include <fstream>
#include <optional>
#include <sstream>

#include "molal/io.h"
#include "molal/smiles.h"

namespace molal {

namespace {

std::optional<std::string> try_canonicalize(const std::string &s) {
  try {
    return canonicalize(s);
  } catch (const Error &) {
    return std::nullopt;
  }
}

struct Fingerprinted {
  std::string smiles;
  Fingerprint fp;
};

std::vector<Fingerprinted> fingerprint_all(std::span<const std::string> smiles, FingerprintKind kind) {
  std::vector<Fingerprinted> out;
  for (const std::string &s : smiles) {
    try {
      out.push_back({s, fingerprint(parse_smiles(s), kind)});
    } catch (const MetricsError &) {
      throw;
    } catch (const Error &) {
    }
  }
  return out;
}

double ratio(std::size_t num, std::size_t den, bool &undefined) {
  if (den == 0) {
    undefined = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

CanonicalSet canonical_set(std::span<const std::string> smiles) {
  CanonicalSet out;
  for (const std::string &s : smiles)
    if (auto c = try_canonicalize(s)) out.insert(std::move(*c));
  return out;
}

nlohmann::json GenerationMetrics::to_json() const {
  return {{"total", total},       {"valid", valid},           {"unique", unique},
          {"novel", novel},       {"validity", validity},     {"uniqueness", uniqueness},
          {"novelty", novelty},   {"undefined", undefined}};
}

GenerationMetrics generation_metrics(std::span<const std::string> generated, const CanonicalSet &training) {
  GenerationMetrics m;
  m.total = generated.size();
  CanonicalSet unique;
  for (const std::string &s : generated) {
    auto c = try_canonicalize(s);
    if (!c) continue;
    ++m.valid;
    unique.insert(std::move(*c));
  }
  m.unique = unique.size();
  for (const std::string &s : unique)
    if (!training.contains(s)) ++m.novel;
  m.validity = ratio(m.valid, m.total, m.undefined);
  m.uniqueness = ratio(m.unique, m.valid, m.undefined);
  m.novelty = ratio(m.novel, m.unique, m.undefined);
  return m;
}

double overlap_percent(const CanonicalSet &of, const CanonicalSet &in) {
  if (of.empty()) return 0.0;
  std::size_t hits = 0;
  for (const std::string &s : of)
    if (in.contains(s)) ++hits;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(of.size());
}

nlohmann::json Memorization::to_json() const { return {{"a", a}, {"b", b}, {"c", c}, {"d", d}}; }

Memorization memorization(const CanonicalSet &generated, const CanonicalSet &al_set_prev,
                          const CanonicalSet &scored_prev) {
  return {overlap_percent(generated, al_set_prev), overlap_percent(generated, scored_prev),
          overlap_percent(al_set_prev, generated), overlap_percent(scored_prev, generated)};
}

std::vector<SimilarityRow> similarity_report(std::span<const std::string> references,
                                             std::span<const std::string> molecules, FingerprintKind kind) {
  const auto refs = fingerprint_all(references, kind);
  const auto mols = fingerprint_all(molecules, kind);
  std::vector<SimilarityRow> rows;
  for (const Fingerprinted &r : refs) {
    SimilarityRow row;
    row.reference = r.smiles;
    double sum = 0.0;
    row.max = -1.0;
    for (const Fingerprinted &m : mols) {
      const double t = tanimoto(r.fp, m.fp);
      sum += t;
      if (t > row.max) {
        row.max = t;
        row.argmax = m.smiles;
      }
    }
    if (mols.empty()) {
      row.max = 0.0;
    } else {
      row.mean = sum / static_cast<double>(mols.size());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double mean_similarity(std::span<const std::string> molecules, const std::string &reference,
                       FingerprintKind kind) {
  const std::string refs[] = {reference};
  const auto rows = similarity_report(refs, molecules, kind);
  if (rows.empty()) throw MetricsError(MetricsErrc::kBadArgument, "unparseable reference '" + reference + "'");
  return rows.front().mean;
}

void write_similarity_report(const std::filesystem::path &path, std::span<const SimilarityRow> rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  const std::vector<std::string> header { "reference", "mean_tc", "max_tc", "argmax_smiles" };
  write_csv_row(out, header);
  for (const SimilarityRow &r : rows) {
    std::ostringstream mean, max;
    mean.precision(17);
    max.precision(17);
    mean << r.mean;
    max << r.max;
    const std::vector<std::string> fields { r.reference, mean.str(), max.str(), r.argmax };
    write_csv_row(out, fields);
  }
}

}  // namespace molal
