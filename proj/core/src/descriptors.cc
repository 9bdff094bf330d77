// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/descriptors.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "molal/element.h"
#include "molal/hash.h"
#include "molal/io.h"
#include "molal/smiles.h"

namespace molal {
namespace {

constexpr double kHydrogenWeight = 1.008;

enum Mqn {
  kC, kF, kCl, kBr, kI, kS, kP, kAcyclicN, kCyclicN, kAcyclicO, kCyclicO, kHeavy,
  kAcceptorSites, kAcceptorAtoms, kDonorSites, kDonorAtoms, kNegative, kPositive,
  kAcyclicSingle, kAcyclicDouble, kAcyclicTriple, kCyclicSingle, kCyclicDouble,
  kCyclicTriple, kRotatable,
  kAcyclicDeg1, kAcyclicDeg2, kAcyclicDeg3, kAcyclicDeg4, kCyclicDeg2, kCyclicDeg3,
  kCyclicDeg4,
  kRing3, kRing4, kRing5, kRing6, kRing7, kRing8, kRing9, kRing10Plus,
  kFusedAtoms, kFusedBonds,
  kMqnCount,
};

static_assert(kMqnCount == 42);

bool is_heavy(const Atom &a) { return a.atomic_number > 1; }

// Whether an aromatic atom takes part in a double bond of a Kekule form.
bool kekule_double_member(const Molecule &mol, int i) {
  const Atom &a = mol.atom(i);
  for (const Neighbor &nb: mol.neighbors(i)) {
    const BondOrder o = mol.bond(nb.bond).order;
    if (o == BondOrder::kDouble || o == BondOrder::kTriple)
      return false;
  }
  const int connections = mol.degree(i) + a.hydrogens;
  switch (a.atomic_number) {
  case 5:
  case 6:
    return a.charge == 0 && connections <= 3;
  case 7:
  case 15:
    return (a.charge == 0 && connections == 2) || (a.charge == 1 && connections == 3);
  case 8:
  case 16:
  case 34:
    return a.charge == 1 && connections == 2;
  default:
    return false;
  }
}

bool is_rotatable(const Molecule &mol, int b) {
  const Bond &bond = mol.bond(b);
  if (bond.order != BondOrder::kSingle || mol.bond_in_ring(b))
    return false;
  const Atom &x = mol.atom(bond.begin);
  const Atom &y = mol.atom(bond.end);
  return is_heavy(x) && is_heavy(y) && mol.degree(bond.begin) >= 2 && mol.degree(bond.end) >= 2;
}

}  // namespace

DescriptorVector::DescriptorVector(std::string schema, std::vector<double> values)
    : schema_(std::move(schema)), values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw DescriptorError(DescriptorErrc::kNonFinite,
                            "descriptor " + std::to_string(i) + " is not finite");
  }
}

const std::vector<std::string> &mqn_names() {
  static const std::vector<std::string> names = {
    "c",    "f",    "cl",   "br",   "i",    "s",    "p",    "an",   "cn",   "ao",   "co",
    "hac",  "hbam", "hba",  "hbdm", "hbd",  "negc", "posc", "asb",  "adb",  "atb",  "csb",
    "cdb",  "ctb",  "rbc",  "asv",  "adv",  "atv",  "aqv",  "cdv",  "ctv",  "cqv",  "r3",
    "r4",   "r5",   "r6",   "r7",   "r8",   "r9",   "rg10", "afrc", "bfrc",
  };
  return names;
}

DescriptorVector compute_mqn(const Molecule &mol) {
  std::vector<double> v(kMqnCount, 0.0);

  for (int i = 0; i < mol.num_atoms(); ++i) {
    const Atom &a = mol.atom(i);
    if (!is_heavy(a))
      continue;
    const bool cyclic = mol.atom_in_ring(i);
    v[kHeavy] += 1;
    switch (a.atomic_number) {
    case 6: v[kC] += 1; break;
    case 9: v[kF] += 1; break;
    case 17: v[kCl] += 1; break;
    case 35: v[kBr] += 1; break;
    case 53: v[kI] += 1; break;
    case 16: v[kS] += 1; break;
    case 15: v[kP] += 1; break;
    case 7: v[cyclic ? kCyclicN : kAcyclicN] += 1; break;
    case 8: v[cyclic ? kCyclicO : kAcyclicO] += 1; break;
    default: break;
    }

    const bool n_or_o = a.atomic_number == 7 || a.atomic_number == 8;
    if (n_or_o && a.charge <= 0) {
      v[kAcceptorAtoms] += 1;
      const int used = mol.explicit_valence(i) + a.hydrogens
                       + (a.aromatic && kekule_double_member(mol, i) ? 1 : 0);
      const int free = element(a.atomic_number).valence_electrons - a.charge - used;
      v[kAcceptorSites] += std::max(0, free / 2);
    }
    if (n_or_o && a.hydrogens > 0) {
      v[kDonorAtoms] += 1;
      v[kDonorSites] += a.hydrogens;
    }
    if (a.charge < 0)
      v[kNegative] += 1;
    if (a.charge > 0)
      v[kPositive] += 1;

    const int deg = mol.degree(i);
    if (cyclic) {
      if (deg >= 2 && deg <= 4)
        v[kCyclicDeg2 + deg - 2] += 1;
    } else if (deg >= 1 && deg <= 4) {
      v[kAcyclicDeg1 + deg - 1] += 1;
    }
    if (mol.atom_ring_count(i) >= 2)
      v[kFusedAtoms] += 1;
  }

  int aromatic_bonds = 0;
  for (int b = 0; b < mol.num_bonds(); ++b) {
    const Bond &bond = mol.bond(b);
    const bool cyclic = mol.bond_in_ring(b);
    switch (bond.order) {
    case BondOrder::kSingle: v[cyclic ? kCyclicSingle : kAcyclicSingle] += 1; break;
    case BondOrder::kDouble: v[cyclic ? kCyclicDouble : kAcyclicDouble] += 1; break;
    case BondOrder::kTriple: v[cyclic ? kCyclicTriple : kAcyclicTriple] += 1; break;
    case BondOrder::kAromatic: ++aromatic_bonds; break;
    }
    if (is_rotatable(mol, b))
      v[kRotatable] += 1;
    if (mol.bond_ring_count(b) >= 2)
      v[kFusedBonds] += 1;
  }

  // Aromatic bonds are split into the single/double counts of a Kekule form.
  int members = 0;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    if (mol.atom(i).aromatic && kekule_double_member(mol, i))
      ++members;
  }
  const int doubles = std::min(aromatic_bonds, members / 2);
  v[kCyclicDouble] += doubles;
  v[kCyclicSingle] += aromatic_bonds - doubles;

  for (const Ring &r: mol.rings()) {
    const auto size = r.atoms.size();
    if (size >= 10)
      v[kRing10Plus] += 1;
    else if (size >= 3)
      v[kRing3 + static_cast<int>(size) - 3] += 1;
  }

  return DescriptorVector(std::string(kMqnSchema), std::move(v));
}

AdmetProperties admet_properties(const Molecule &mol, const ExternalProperties &external) {
  AdmetProperties p;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    const Atom &a = mol.atom(i);
    p.molecular_weight += a.isotope ? static_cast<double>(*a.isotope)
                                    : element(a.atomic_number).atomic_weight;
    p.molecular_weight += a.hydrogens * kHydrogenWeight;
    p.formal_charge += a.charge;
    const bool n_or_o = a.atomic_number == 7 || a.atomic_number == 8;
    if (n_or_o && a.charge <= 0)
      ++p.hbond_acceptors;
    if (n_or_o && a.hydrogens > 0)
      ++p.hbond_donors;
    if (is_heavy(a) && a.atomic_number != 6)
      ++p.heteroatoms;
  }
  for (int b = 0; b < mol.num_bonds(); ++b) {
    if (is_rotatable(mol, b))
      ++p.rotatable_bonds;
  }
  p.rings = mol.num_bonds() - mol.num_atoms() + mol.num_components();
  p.tpsa = external.tpsa;
  p.logp = external.logp;
  return p;
}

std::string table_schema_id(const std::vector<std::string> &names) {
  std::uint64_t h = kFnvOffset;
  for (const std::string &n: names)
    h = fnv1a64(",", fnv1a64(n, h));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("table:") + buf;
}

DescriptorTable ingest_descriptor_table(std::istream &in) {
  const CsvTable csv = read_csv(in);
  if (csv.header.empty() || csv.header.front() != "smiles")
    throw DescriptorError(DescriptorErrc::kSchemaMismatch, "first column must be 'smiles'");
  DescriptorTable table;
  table.names.assign(csv.header.begin() + 1, csv.header.end());
  if (table.names.empty())
    throw DescriptorError(DescriptorErrc::kSchemaMismatch, "no descriptor columns");
  table.schema = table_schema_id(table.names);

  for (const CsvRow &row: csv.rows) {
    if (row.fields.size() != csv.header.size())
      throw DescriptorError(DescriptorErrc::kSchemaMismatch,
                            "line " + std::to_string(row.line) + ": expected "
                                + std::to_string(csv.header.size()) + " columns, got "
                                + std::to_string(row.fields.size()));
    const std::string &smiles = row.fields.front();
    std::string key;
    try {
      key = canonicalize(smiles);
    } catch (const SmilesError &e) {
      table.rejects.push_back({row.line, smiles, e.what()});
      continue;
    }
    std::vector<double> values;
    std::string problem;
    for (std::size_t c = 1; c < row.fields.size(); ++c) {
      const auto v = parse_double(row.fields[c]);
      if (!v) {
        problem = "column '" + csv.header[c] + "' is not a number";
        break;
      }
      if (!std::isfinite(*v)) {
        problem = "column '" + csv.header[c] + "' is not finite";
        break;
      }
      values.push_back(*v);
    }
    if (!problem.empty()) {
      table.rejects.push_back({row.line, smiles, problem});
      continue;
    }
    DescriptorVector vec(table.schema, std::move(values));
    auto [it, inserted] = table.rows.emplace(key, vec);
    if (!inserted && !(it->second == vec))
      throw DescriptorError(DescriptorErrc::kDuplicateKey,
                            "line " + std::to_string(row.line) + ": '" + key
                                + "' appears twice with different values");
  }
  return table;
}

DescriptorTable ingest_descriptor_table(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open '" + path.string() + "'");
  return ingest_descriptor_table(in);
}

void write_rejects(const std::filesystem::path &path, const std::vector<RejectedRow> &rejects) {
  std::string out = "line,smiles,reason\n";
  for (const RejectedRow &r: rejects)
    out += std::to_string(r.line) + "," + csv_field(r.smiles) + "," + csv_field(r.reason) + "\n";
  write_file(path, out);
}

}  // namespace molal
