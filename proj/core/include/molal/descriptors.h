// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_DESCRIPTORS_H_
#define MOLAL_DESCRIPTORS_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "molal/error.h"
#include "molal/molecule.h"

namespace molal {

enum class DescriptorErrc {
  kNonFinite,
  kSchemaMismatch,
  kDuplicateKey,
};

using DescriptorError = CodedError<DescriptorErrc>;

inline constexpr std::string_view kMqnSchema = "mqn42";

// Fixed-length real vector tagged with the descriptor set it belongs to.
// Construction rejects NaN and infinities.
class DescriptorVector {
 public:
  DescriptorVector() = default;
  DescriptorVector(std::string schema, std::vector<double> values);

  const std::string &schema() const { return schema_; }
  const std::vector<double> &values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const DescriptorVector &, const DescriptorVector &) = default;

 private:
  std::string schema_;
  std::vector<double> values_;
};

// Short names of the 42 molecular quantum numbers, in vector order.
const std::vector<std::string> &mqn_names();

DescriptorVector compute_mqn(const Molecule &mol);

struct AdmetProperties {
  double molecular_weight = 0.0;  // Da
  int hbond_acceptors = 0;
  int hbond_donors = 0;
  int rotatable_bonds = 0;
  int rings = 0;
  int heteroatoms = 0;
  int formal_charge = 0;
  std::optional<double> tpsa;  // square angstrom
  std::optional<double> logp;
};

struct ExternalProperties {
  std::optional<double> tpsa;
  std::optional<double> logp;
};

AdmetProperties admet_properties(const Molecule &mol, const ExternalProperties &external = {});

struct RejectedRow {
  std::size_t line = 0;
  std::string smiles;
  std::string reason;
};

struct DescriptorTable {
  std::string schema;
  std::vector<std::string> names;
  std::map<std::string, DescriptorVector> rows;  // canonical SMILES -> vector
  std::vector<RejectedRow> rejects;
};

// CSV with header "smiles,<name1>,...,<nameN>". The schema id is derived
// from the column names. Rows with unparseable SMILES or non-finite values
// are rejected; a wrong column count throws kSchemaMismatch and two rows
// with the same canonical key but different values throw kDuplicateKey.
DescriptorTable ingest_descriptor_table(std::istream &in);
DescriptorTable ingest_descriptor_table(const std::filesystem::path &path);

// "table:" + 16 hex digits of FNV-1a over the joined column names.
std::string table_schema_id(const std::vector<std::string> &names);

void write_rejects(const std::filesystem::path &path, const std::vector<RejectedRow> &rejects);

}  // namespace molal

#endif  // MOLAL_DESCRIPTORS_H_
