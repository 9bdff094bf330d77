// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_FILTERS_H_
#define MOLAL_FILTERS_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "molal/descriptors.h"
#include "molal/error.h"
#include "molal/molecule.h"

namespace molal {

enum class FilterErrc {
  kBadBounds,
  kBadPattern,
  kFormat,
};

using FilterError = CodedError<FilterErrc>;

enum class AdmetMetric {
  kMolecularWeight,
  kHbondAcceptors,
  kHbondDonors,
  kRotatableBonds,
  kRings,
  kHeteroatoms,
  kFormalCharge,
  kTpsa,
  kLogp,
};

inline constexpr std::size_t kNumAdmetMetrics = 9;

// Human readable name, e.g. "formal charge".
std::string_view admet_metric_name(AdmetMetric m);
// JSON key, e.g. "formal_charge".
std::string_view admet_metric_key(AdmetMetric m);

struct MetricBounds {
  double lower = 0.0;
  double upper = 0.0;

  friend bool operator==(const MetricBounds &, const MetricBounds &) = default;
};

struct AdmetBounds {
  std::array<MetricBounds, kNumAdmetMetrics> bounds = {{
      {100.0, 600.0},
      {0.0, 12.0},
      {0.0, 7.0},
      {0.0, 11.0},
      {0.0, 6.0},
      {1.0, 15.0},
      {-4.0, 4.0},
      {0.0, 140.0},
      {-0.4, 6.5},
  }};

  MetricBounds &operator[](AdmetMetric m) { return bounds[static_cast<std::size_t>(m)]; }
  const MetricBounds &operator[](AdmetMetric m) const { return bounds[static_cast<std::size_t>(m)]; }

  // Throws kBadBounds when lower > upper or a bound is NaN.
  void validate() const;

  nlohmann::json to_json() const;
  // Keys missing from the object keep their defaults.
  static AdmetBounds from_json(const nlohmann::json &j);
  static AdmetBounds load(const std::filesystem::path &path);

  friend bool operator==(const AdmetBounds &, const AdmetBounds &) = default;
};

struct AdmetVerdict {
  bool pass = true;
  std::vector<AdmetMetric> failing;
};

// Bounds are inclusive. Missing TPSA or logP passes unless strict.
AdmetVerdict admet_filter(const AdmetProperties &props, const AdmetBounds &bounds, bool strict = false);

// Unset fields match anything.
struct AtomQuery {
  std::optional<int> atomic_number;
  std::optional<int> charge;
  std::optional<bool> aromatic;
  std::optional<int> h_count;
  std::optional<int> degree;
  std::optional<int> connectivity;  // degree + hydrogens

  bool matches(const Molecule &mol, int atom) const;
};

struct BondQuery {
  int a = 0;
  int b = 0;
  std::optional<BondOrder> order;  // nullopt matches any order

  bool matches(BondOrder o) const { return !order || *order == o; }
};

struct MotifPattern {
  std::string name;
  std::vector<AtomQuery> atoms;
  std::vector<BondQuery> bonds;

  // Nonempty, connected, at most kMaxAtoms atoms, no duplicate or self bonds.
  void validate() const;

  static constexpr int kMaxAtoms = 12;
};

// Pattern schema:
//   {"name": str,
//    "atoms": [{"element": "N", "charge": 1, "aromatic": false,
//               "h_count": 0, "degree": 2, "connectivity": 3}, ...],
//    "bonds": [[i, j, "single"|"double"|"triple"|"aromatic"|"any"], ...]}
MotifPattern pattern_from_json(const nlohmann::json &j);
nlohmann::json to_json(const MotifPattern &p);

// Accepts either a bare array of patterns or {"patterns": [...]}.
std::vector<MotifPattern> patterns_from_json(const nlohmann::json &j);
std::vector<MotifPattern> load_patterns(const std::filesystem::path &path);

// The shipped functional-group exclusions.
const std::vector<MotifPattern> &default_patterns();

// True iff the pattern embeds into the molecule as a (not necessarily
// induced) subgraph that respects every atom and bond constraint.
bool match_motif(const Molecule &mol, const MotifPattern &pattern);

struct GroupVerdict {
  bool pass = true;
  std::string matched;  // first matching pattern when !pass
};

GroupVerdict functional_group_filter(const Molecule &mol, std::span<const MotifPattern> patterns);

struct FilterSet {
  bool admet = false;
  bool groups = false;
  bool strict = false;
  AdmetBounds bounds;
  std::vector<MotifPattern> patterns = default_patterns();

  bool any() const { return admet || groups; }

  // Rejection reason such as "admet:molecular weight" or "group:azide",
  // nullopt when the molecule passes.
  std::optional<std::string> reject_reason(const Molecule &mol) const;
};

struct FilterReportRow {
  std::string smiles;
  bool pass = true;
  std::string reason;
};

FilterReportRow filter_smiles(std::string_view smiles, const FilterSet &filters);

// CSV "smiles,verdict,reason" with verdict pass/fail.
void write_filter_report(const std::filesystem::path &path, std::span<const FilterReportRow> rows);

}  // namespace molal

#endif  // MOLAL_FILTERS_H_
