// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "molal/element.h"
#include "molal/smiles.h"

namespace molal {
namespace {

struct AtomPlan {
  std::vector<int> children;  // tree bonds, in visiting order
  std::vector<int> opens;     // ring bonds opened at this atom
  std::vector<int> closes;    // ring bonds closed at this atom
};

class Writer {
 public:
  Writer(const Molecule &mol, std::span<const int> ranks, const WriteOptions &opts)
      : mol_(mol), ranks_(ranks), opts_(opts),
        plan_(static_cast<std::size_t>(mol.num_atoms())),
        visited_(static_cast<std::size_t>(mol.num_atoms()), false),
        handled_(static_cast<std::size_t>(mol.num_bonds()), false),
        digit_of_(static_cast<std::size_t>(mol.num_bonds()), -1) { }

  std::string run() {
    std::vector<int> order(static_cast<std::size_t>(mol_.num_atoms()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [this](int a, int b) { return rank(a) < rank(b); });

    std::string out;
    for (int start: order) {
      if (visited_[static_cast<std::size_t>(start)])
        continue;
      plan(start, -1);
      if (!out.empty())
        out += '.';
      write(start, -1, -1, out);
    }
    return out;
  }

 private:
  int rank(int atom) const { return ranks_[static_cast<std::size_t>(atom)]; }

  std::vector<Neighbor> sorted_neighbors(int atom) const {
    auto nbrs = mol_.neighbors(atom);
    std::vector<Neighbor> sorted(nbrs.begin(), nbrs.end());
    std::sort(sorted.begin(), sorted.end(),
              [this](const Neighbor &a, const Neighbor &b) { return rank(a.atom) < rank(b.atom); });
    return sorted;
  }

  void plan(int atom, int parent_bond) {
    visited_[static_cast<std::size_t>(atom)] = true;
    if (parent_bond >= 0)
      handled_[static_cast<std::size_t>(parent_bond)] = true;
    for (const Neighbor &nb: sorted_neighbors(atom)) {
      if (nb.bond == parent_bond || handled_[static_cast<std::size_t>(nb.bond)])
        continue;
      if (visited_[static_cast<std::size_t>(nb.atom)]) {
        // Back edge to an ancestor: the ring opens there, closes here.
        handled_[static_cast<std::size_t>(nb.bond)] = true;
        plan_[static_cast<std::size_t>(nb.atom)].opens.push_back(nb.bond);
        plan_[static_cast<std::size_t>(atom)].closes.push_back(nb.bond);
        continue;
      }
      plan_[static_cast<std::size_t>(atom)].children.push_back(nb.bond);
      plan(nb.atom, nb.bond);
    }
  }

  std::string bond_symbol(int bond, int from) const {
    const Bond &b = mol_.bond(bond);
    const bool both_aromatic = mol_.atom(b.begin).aromatic && mol_.atom(b.end).aromatic;
    switch (b.order) {
    case BondOrder::kSingle:
      if (opts_.stereo && b.stereo != BondStereo::kNone) {
        BondStereo dir = b.stereo;
        if (b.begin != from)
          dir = dir == BondStereo::kUp ? BondStereo::kDown : BondStereo::kUp;
        return dir == BondStereo::kUp ? "/" : "\\";
      }
      return both_aromatic ? "-" : "";
    case BondOrder::kDouble:
      return "=";
    case BondOrder::kTriple:
      return "#";
    case BondOrder::kAromatic:
      return both_aromatic ? "" : ":";
    }
    return "";
  }

  std::string atom_symbol(int i) const {
    const Atom &a = mol_.atom(i);
    std::optional<int> implied;
    try {
      implied = default_hydrogens(mol_, i);
    } catch (const MoleculeError &) {
      implied.reset();
    }
    const bool chiral = opts_.stereo && a.chirality != Chirality::kNone;
    std::string sym(element(a.atomic_number).symbol);
    if (a.aromatic)
      sym[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(sym[0])));
    if (implied && *implied == a.hydrogens && !chiral)
      return sym;

    std::string out = "[";
    if (a.isotope)
      out += std::to_string(*a.isotope);
    out += sym;
    if (chiral)
      out += a.chirality == Chirality::kAnticlockwise ? "@" : "@@";
    if (a.hydrogens > 0) {
      out += 'H';
      if (a.hydrogens > 1)
        out += std::to_string(a.hydrogens);
    }
    if (a.charge != 0) {
      out += a.charge > 0 ? '+' : '-';
      if (std::abs(a.charge) > 1)
        out += std::to_string(std::abs(a.charge));
    }
    out += ']';
    return out;
  }

  static std::string digit_text(int d) {
    if (d < 10)
      return std::string(1, static_cast<char>('0' + d));
    return "%" + std::to_string(d);
  }

  void write(int atom, int parent_bond, int from, std::string &out) {
    if (parent_bond >= 0)
      out += bond_symbol(parent_bond, from);
    out += atom_symbol(atom);

    const AtomPlan &p = plan_[static_cast<std::size_t>(atom)];
    std::vector<int> released;
    for (int b: p.closes) {
      const int d = digit_of_[static_cast<std::size_t>(b)];
      out += digit_text(d);
      released.push_back(d);
    }
    for (int b: p.opens) {
      int d = 1;
      while (in_use_.count(d) != 0
             || std::find(released.begin(), released.end(), d) != released.end())
        ++d;
      if (d > 99)
        throw Error("more than 99 simultaneously open rings");
      in_use_.insert(d);
      digit_of_[static_cast<std::size_t>(b)] = d;
      out += bond_symbol(b, atom);
      out += digit_text(d);
    }
    for (int d: released)
      in_use_.erase(d);

    for (std::size_t i = 0; i < p.children.size(); ++i) {
      const int b = p.children[i];
      const int child = mol_.bond(b).other(atom);
      if (i + 1 < p.children.size()) {
        out += '(';
        write(child, b, atom, out);
        out += ')';
      } else {
        write(child, b, atom, out);
      }
    }
  }

  const Molecule &mol_;
  std::span<const int> ranks_;
  WriteOptions opts_;
  std::vector<AtomPlan> plan_;
  std::vector<bool> visited_;
  std::vector<bool> handled_;
  std::vector<int> digit_of_;
  std::set<int> in_use_;
};

// Dense ranking of atoms by key.
template <class Key>
std::vector<int> dense_rank(const std::vector<Key> &keys, int *classes) {
  std::vector<int> idx(keys.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&keys](int a, int b) {
    return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)];
  });
  std::vector<int> ranks(keys.size(), 0);
  int r = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i > 0 && keys[static_cast<std::size_t>(idx[i - 1])] < keys[static_cast<std::size_t>(idx[i])])
      ++r;
    ranks[static_cast<std::size_t>(idx[i])] = r;
  }
  *classes = keys.empty() ? 0 : r + 1;
  return ranks;
}

class Canonicalizer {
 public:
  explicit Canonicalizer(const Molecule &mol) : mol_(mol) { }

  std::vector<int> run() {
    const int n = mol_.num_atoms();
    std::vector<std::vector<long>> keys(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const Atom &a = mol_.atom(i);
      keys[static_cast<std::size_t>(i)] = {
        mol_.degree(i),     a.atomic_number, a.isotope.value_or(0), a.charge,
        a.aromatic ? 1 : 0, a.hydrogens,     mol_.atom_in_ring(i) ? 1 : 0,
      };
    }
    int classes = 0;
    search(dense_rank(keys, &classes));
    return best_ranks_;
  }

 private:
  static constexpr int kLeafBudget = 2048;

  std::vector<int> refine(std::vector<int> ranks) const {
    const int n = mol_.num_atoms();
    int classes = 0;
    for (int i = 0; i < n; ++i)
      classes = std::max(classes, ranks[static_cast<std::size_t>(i)] + 1);
    while (true) {
      std::vector<std::vector<long>> keys(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        std::vector<long> nb;
        for (const Neighbor &x: mol_.neighbors(i))
          nb.push_back(static_cast<long>(ranks[static_cast<std::size_t>(x.atom)]) * 8
                       + static_cast<long>(mol_.bond(x.bond).order));
        std::sort(nb.begin(), nb.end());
        auto &k = keys[static_cast<std::size_t>(i)];
        k.push_back(ranks[static_cast<std::size_t>(i)]);
        k.insert(k.end(), nb.begin(), nb.end());
      }
      int next_classes = 0;
      std::vector<int> next = dense_rank(keys, &next_classes);
      if (next_classes == classes)
        return next;
      ranks = std::move(next);
      classes = next_classes;
    }
  }

  void search(std::vector<int> ranks) {
    ranks = refine(std::move(ranks));
    const int n = mol_.num_atoms();

    // Smallest rank value shared by more than one atom.
    std::vector<int> count(static_cast<std::size_t>(n), 0);
    for (int r: ranks)
      ++count[static_cast<std::size_t>(r)];
    int tied = -1;
    for (int r = 0; r < n; ++r) {
      if (count[static_cast<std::size_t>(r)] > 1) {
        tied = r;
        break;
      }
    }

    if (tied < 0) {
      std::string s = Writer(mol_, ranks, {}).run();
      ++leaves_;
      if (best_ranks_.empty() || s < best_) {
        best_ = std::move(s);
        best_ranks_ = ranks;
      }
      return;
    }

    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (ranks[static_cast<std::size_t>(i)] == tied)
        members.push_back(i);
    }

    // Interchangeable terminal atoms on a common neighbour: one branch.
    bool terminal_siblings = true;
    for (int m: members) {
      if (mol_.degree(m) != 1
          || mol_.neighbors(m)[0].atom != mol_.neighbors(members[0])[0].atom) {
        terminal_siblings = false;
        break;
      }
    }

    for (std::size_t k = 0; k < members.size(); ++k) {
      if (k > 0 && (terminal_siblings || leaves_ >= kLeafBudget))
        break;
      std::vector<long> keys(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        keys[static_cast<std::size_t>(i)] =
            2L * ranks[static_cast<std::size_t>(i)] + (i == members[k] ? 0 : 1);
      int classes = 0;
      search(dense_rank(keys, &classes));
    }
  }

  const Molecule &mol_;
  std::string best_;
  std::vector<int> best_ranks_;
  int leaves_ = 0;
};

}  // namespace

std::string write_smiles(const Molecule &mol, std::span<const int> ranks,
                         const WriteOptions &options) {
  if (static_cast<int>(ranks.size()) != mol.num_atoms())
    throw Error("rank vector size does not match atom count");
  return Writer(mol, ranks, options).run();
}

std::vector<int> canonical_ranks(const Molecule &mol) {
  if (mol.num_atoms() == 0)
    return {};
  return Canonicalizer(mol).run();
}

std::string canonical_string(const Molecule &mol) {
  const std::vector<int> ranks = canonical_ranks(mol);
  return write_smiles(mol, ranks);
}

std::string canonicalize(std::string_view text) {
  return canonical_string(parse_smiles(text));
}

std::string random_smiles(const Molecule &mol, std::mt19937_64 &rng) {
  std::vector<int> ranks(static_cast<std::size_t>(mol.num_atoms()));
  std::iota(ranks.begin(), ranks.end(), 0);
  std::shuffle(ranks.begin(), ranks.end(), rng);
  return write_smiles(mol, ranks);
}

}  // namespace molal
