// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/molecule.h"

#include <algorithm>
#include <set>
#include <string>
#include <utility>

#include "molal/element.h"
#include "molal/rings.h"

namespace molal {

Molecule::Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  const int n = num_atoms();
  for (const Atom &a: atoms_) {
    if (a.atomic_number < 1 || a.atomic_number > max_atomic_number())
      throw MoleculeError(MoleculeErrc::kUnknownElement,
                          "unknown atomic number " + std::to_string(a.atomic_number));
  }

  std::set<std::pair<int, int>> seen;
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (const Bond &b: bonds_) {
    if (b.begin < 0 || b.begin >= n || b.end < 0 || b.end >= n)
      throw MoleculeError(MoleculeErrc::kBadAtomIndex, "bond endpoint out of range");
    if (b.begin == b.end)
      throw MoleculeError(MoleculeErrc::kSelfLoop,
                          "atom " + std::to_string(b.begin) + " bonded to itself");
    if (!seen.emplace(std::min(b.begin, b.end), std::max(b.begin, b.end)).second)
      throw MoleculeError(MoleculeErrc::kDuplicateBond,
                          "duplicate bond " + std::to_string(b.begin) + "-"
                              + std::to_string(b.end));
    ++degree[static_cast<std::size_t>(b.begin)];
    ++degree[static_cast<std::size_t>(b.end)];
  }

  adj_offset_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i)
    adj_offset_[static_cast<std::size_t>(i) + 1] =
        adj_offset_[static_cast<std::size_t>(i)] + degree[static_cast<std::size_t>(i)];
  adj_.resize(static_cast<std::size_t>(adj_offset_.back()));
  std::vector<int> fill(adj_offset_.begin(), adj_offset_.end() - 1);
  for (int bi = 0; bi < num_bonds(); ++bi) {
    const Bond &b = bonds_[static_cast<std::size_t>(bi)];
    adj_[static_cast<std::size_t>(fill[static_cast<std::size_t>(b.begin)]++)] = { b.end, bi };
    adj_[static_cast<std::size_t>(fill[static_cast<std::size_t>(b.end)]++)] = { b.begin, bi };
  }

  for (int i = 0; i < n; ++i) {
    Atom &a = atoms_[static_cast<std::size_t>(i)];
    if (a.bracket) {
      const ValenceList valences = allowed_valences(a.atomic_number, a.charge);
      if (!valences.empty() && explicit_valence(i) + a.hydrogens > valences.max())
        throw MoleculeError(MoleculeErrc::kValence,
                            "atom " + std::to_string(i) + " exceeds its allowed valence");
      continue;
    }
    std::optional<int> h = default_hydrogens(*this, i);
    if (h)
      a.hydrogens = *h;
    else
      a.bracket = true;  // keep caller-provided hydrogens
  }

  ring_bond_ = rings::cyclic_bonds(n, bonds_);
  ring_atom_.assign(static_cast<std::size_t>(n), false);
  for (int bi = 0; bi < num_bonds(); ++bi) {
    if (ring_bond_[static_cast<std::size_t>(bi)]) {
      ring_atom_[static_cast<std::size_t>(bonds_[static_cast<std::size_t>(bi)].begin)] = true;
      ring_atom_[static_cast<std::size_t>(bonds_[static_cast<std::size_t>(bi)].end)] = true;
    }
  }
  num_components_ = rings::count_components(n, bonds_);
  rings_ = rings::minimum_cycle_basis(n, bonds_, ring_bond_);
  atom_ring_count_.assign(static_cast<std::size_t>(n), 0);
  bond_ring_count_.assign(bonds_.size(), 0);
  for (const Ring &r: rings_) {
    for (int a: r.atoms)
      ++atom_ring_count_[static_cast<std::size_t>(a)];
    for (int b: r.bonds)
      ++bond_ring_count_[static_cast<std::size_t>(b)];
  }
}

int Molecule::find_bond(int a, int b) const {
  for (const Neighbor &nb: neighbors(a)) {
    if (nb.atom == b)
      return nb.bond;
  }
  return -1;
}

int Molecule::explicit_valence(int i) const {
  int v = 0;
  for (const Neighbor &nb: neighbors(i)) {
    const BondOrder order = bond(nb.bond).order;
    v += order == BondOrder::kAromatic ? 1 : static_cast<int>(order);
  }
  return v;
}

Molecule Molecule::permuted(std::span<const int> new_index) const {
  std::vector<Atom> atoms(atoms_.size());
  for (int i = 0; i < num_atoms(); ++i)
    atoms[static_cast<std::size_t>(new_index[static_cast<std::size_t>(i)])] =
        atoms_[static_cast<std::size_t>(i)];
  std::vector<Bond> bonds;
  bonds.reserve(bonds_.size());
  for (const Bond &b: bonds_) {
    Bond nb = b;
    nb.begin = new_index[static_cast<std::size_t>(b.begin)];
    nb.end = new_index[static_cast<std::size_t>(b.end)];
    bonds.push_back(nb);
  }
  return Molecule(std::move(atoms), std::move(bonds));
}

std::optional<int> default_hydrogens(const Molecule &mol, int i) {
  const Atom &a = mol.atom(i);
  if (!is_organic_subset(a.atomic_number) || a.charge != 0 || a.isotope)
    return std::nullopt;
  if (a.aromatic && !is_aromatic_organic_subset(a.atomic_number))
    return std::nullopt;

  const ValenceList valences = allowed_valences(a.atomic_number, 0);
  const int explicit_v = mol.explicit_valence(i);

  if (a.aromatic) {
    // An aromatic C/N/B/P contributes one pi electron unless it already
    // carries an exocyclic multiple bond; O and S contribute a lone pair.
    bool multiple = false;
    for (const Neighbor &nb: mol.neighbors(i)) {
      const BondOrder order = mol.bond(nb.bond).order;
      multiple |= order == BondOrder::kDouble || order == BondOrder::kTriple;
    }
    const bool pi = !multiple
                    && (a.atomic_number == 5 || a.atomic_number == 6
                        || a.atomic_number == 7 || a.atomic_number == 15);
    if (explicit_v > valences.max())
      throw MoleculeError(MoleculeErrc::kValence,
                          "aromatic atom " + std::to_string(i) + " exceeds its allowed valence");
    return std::max(0, valences.values[0] - explicit_v - (pi ? 1 : 0));
  }

  for (int v: valences) {
    if (v >= explicit_v)
      return v - explicit_v;
  }
  throw MoleculeError(MoleculeErrc::kValence,
                      "atom " + std::to_string(i) + " exceeds its allowed valence");
}

}  // namespace molal
