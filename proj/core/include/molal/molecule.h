// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_MOLECULE_H_
#define MOLAL_MOLECULE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "molal/error.h"

namespace molal {

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

// Tetrahedral marker as written ("@" / "@@"). Preserved, never interpreted.
enum class Chirality : std::uint8_t {
  kNone,
  kAnticlockwise,
  kClockwise,
};

// Directional single bond marker ("/" / "\"), relative to begin -> end.
enum class BondStereo : std::uint8_t {
  kNone,
  kUp,
  kDown,
};

struct Atom {
  int atomic_number = 6;
  int charge = 0;
  bool aromatic = false;
  // Bracket atoms carry an explicit hydrogen count; for the others the
  // count is derived from the default valence model.
  bool bracket = false;
  int hydrogens = 0;
  std::optional<int> isotope;
  Chirality chirality = Chirality::kNone;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::kSingle;
  BondStereo stereo = BondStereo::kNone;

  int other(int atom) const { return atom == begin ? end : begin; }
};

struct Neighbor {
  int atom;
  int bond;
};

// One ring of the minimum cycle basis. Atoms are listed in ring order.
struct Ring {
  std::vector<int> atoms;
  std::vector<int> bonds;
};

enum class MoleculeErrc {
  kBadAtomIndex,
  kSelfLoop,
  kDuplicateBond,
  kValence,
  kUnknownElement,
};

using MoleculeError = CodedError<MoleculeErrc>;

// Attributed molecular graph. Immutable once constructed; construction
// validates indices and valences, assigns implicit hydrogens to non-bracket
// atoms and perceives rings.
class Molecule {
 public:
  Molecule() = default;
  Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds);

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }

  const Atom &atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  const Bond &bond(int i) const { return bonds_[static_cast<std::size_t>(i)]; }
  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const Bond> bonds() const { return bonds_; }

  std::span<const Neighbor> neighbors(int i) const {
    const auto b = static_cast<std::size_t>(adj_offset_[static_cast<std::size_t>(i)]);
    const auto e = static_cast<std::size_t>(adj_offset_[static_cast<std::size_t>(i) + 1]);
    return std::span<const Neighbor>(adj_).subspan(b, e - b);
  }

  // Number of explicit neighbours (graph degree).
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }

  // Returns -1 if the atoms are not bonded.
  int find_bond(int a, int b) const;

  bool atom_in_ring(int i) const { return ring_atom_[static_cast<std::size_t>(i)]; }
  bool bond_in_ring(int i) const { return ring_bond_[static_cast<std::size_t>(i)]; }

  // Minimum cycle basis, sorted by size then by atom indices.
  std::span<const Ring> rings() const { return rings_; }
  int num_components() const { return num_components_; }

  // Number of basis rings containing each atom / bond.
  int atom_ring_count(int i) const { return atom_ring_count_[static_cast<std::size_t>(i)]; }
  int bond_ring_count(int i) const { return bond_ring_count_[static_cast<std::size_t>(i)]; }

  // Sum of explicit bond orders, aromatic bonds counted as 1.
  int explicit_valence(int i) const;

  // Relabels atoms: atom i of this molecule becomes atom new_index[i].
  Molecule permuted(std::span<const int> new_index) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<int> adj_offset_ { 0 };
  std::vector<Neighbor> adj_;
  std::vector<bool> ring_atom_;
  std::vector<bool> ring_bond_;
  std::vector<int> atom_ring_count_;
  std::vector<int> bond_ring_count_;
  std::vector<Ring> rings_;
  int num_components_ = 0;
};

// Hydrogen count implied by the default valence model for an atom written
// without brackets. Returns nullopt when the atom cannot be written that way
// (charged, isotopic, outside the organic subset) and throws MoleculeError
// kValence when its bonds exceed every allowed valence.
std::optional<int> default_hydrogens(const Molecule &mol, int atom);

}  // namespace molal

#endif  // MOLAL_MOLECULE_H_
