// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_TESTS_TEST_UTIL_H_
#define MOLAL_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "molal/filters.h"
#include "molal/molecule.h"

namespace molal::testing {

// Twenty molecules with rings, branches, charges and heteroatoms.
inline const std::vector<std::string> &drug_like() {
  static const std::vector<std::string> kMolecules = {
      "CC(=O)Oc1ccccc1C(=O)O",
      "CN1C=NC2=C1C(=O)N(C(=O)N2C)C",
      "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
      "CC(=O)Nc1ccc(O)cc1",
      "c1ccc2c(c1)ccc1ccccc12",
      "OC(=O)C1CCCN1",
      "C1CCC(CC1)N1CCOCC1",
      "Clc1ccc(cc1)C(c1ccccc1)N1CCNCC1",
      "CCN(CC)CC(=O)Nc1c(C)cccc1C",
      "O=C1NC(=O)C(N1)(c1ccccc1)c1ccccc1",
      "C[N+](C)(C)CCO",
      "CC1=C(C(=O)[O-])N2C(=O)CC2S1",
      "COc1ccc2[nH]cc(CCN)c2c1",
      "Nc1ncnc2n(cnc12)C1OC(CO)C(O)C1O",
      "FC(F)(F)c1ccc(Oc2ccccc2)cc1",
      "CC(C)NCC(O)COc1cccc2ccccc12",
      "O=C(O)c1ccncc1",
      "C#CCN(C)Cc1ccccc1",
      "Brc1cccs1",
      "CSCC[C@H](N)C(=O)O",
  };
  return kMolecules;
}

// Random connected graph of C/N/O/S atoms with occasional double bonds
// and one optional ring closure; retried until it passes valence checks.
inline Molecule random_molecule(std::mt19937_64 &rng, int max_atoms) {
  static const int kElements[] = {6, 6, 6, 7, 8, 16};
  std::uniform_int_distribution<int> pick_el(0, 5);
  while (true) {
    const int n = std::uniform_int_distribution<int>(2, max_atoms)(rng);
    std::vector<Atom> atoms(static_cast<std::size_t>(n));
    for (Atom &a: atoms)
      a.atomic_number = kElements[pick_el(rng)];
    std::vector<Bond> bonds;
    for (int i = 1; i < n; ++i) {
      Bond b;
      b.begin = std::uniform_int_distribution<int>(0, i - 1)(rng);
      b.end = i;
      b.order = std::bernoulli_distribution(0.2)(rng) ? BondOrder::kDouble : BondOrder::kSingle;
      bonds.push_back(b);
    }
    if (n >= 4 && std::bernoulli_distribution(0.4)(rng)) {
      const int a = std::uniform_int_distribution<int>(0, n - 1)(rng);
      const int b = std::uniform_int_distribution<int>(0, n - 1)(rng);
      bool present = a == b;
      for (const Bond &x: bonds)
        present = present || (x.begin == a && x.end == b) || (x.begin == b && x.end == a);
      if (!present)
        bonds.push_back(Bond{a, b, BondOrder::kSingle, BondStereo::kNone});
    }
    try {
      return Molecule(std::move(atoms), std::move(bonds));
    } catch (const std::exception &) {
    }
  }
}

inline std::vector<int> random_permutation(int n, std::mt19937_64 &rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("molal_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Random connected pattern grown from a molecule, with a random subset of
// its constraints kept and occasional perturbations.
inline MotifPattern random_pattern(const Molecule &src, std::mt19937_64 &rng) {
  const int size = std::min(src.num_atoms(), std::uniform_int_distribution<int>(1, 5)(rng));
  std::vector<int> chosen = {std::uniform_int_distribution<int>(0, src.num_atoms() - 1)(rng)};
  while (static_cast<int>(chosen.size()) < size) {
    std::vector<int> frontier;
    for (int a: chosen)
      for (const Neighbor &n: src.neighbors(a))
        if (std::find(chosen.begin(), chosen.end(), n.atom) == chosen.end())
          frontier.push_back(n.atom);
    if (frontier.empty())
      break;
    chosen.push_back(frontier[std::uniform_int_distribution<std::size_t>(0, frontier.size() - 1)(rng)]);
  }
  std::bernoulli_distribution keep(0.5), perturb(0.15);
  MotifPattern p;
  p.name = "random";
  for (int a: chosen) {
    const Atom &atom = src.atom(a);
    AtomQuery q;
    if (keep(rng))
      q.atomic_number = perturb(rng) ? 7 : atom.atomic_number;
    if (keep(rng))
      q.h_count = perturb(rng) ? atom.hydrogens + 1 : atom.hydrogens;
    if (keep(rng))
      q.degree = src.degree(a);
    if (keep(rng) && keep(rng))
      q.connectivity = src.degree(a) + atom.hydrogens;
    if (keep(rng) && keep(rng))
      q.charge = atom.charge;
    if (keep(rng) && keep(rng))
      q.aromatic = atom.aromatic;
    p.atoms.push_back(q);
  }
  for (std::size_t i = 0; i < chosen.size(); ++i)
    for (std::size_t j = i + 1; j < chosen.size(); ++j) {
      const int b = src.find_bond(chosen[i], chosen[j]);
      if (b < 0)
        continue;
      BondQuery q{static_cast<int>(i), static_cast<int>(j), {}};
      if (keep(rng))
        q.order = perturb(rng) ? BondOrder::kTriple : src.bond(b).order;
      p.bonds.push_back(q);
    }
  return p;
}

}  // namespace molal::testing

#endif  // MOLAL_TESTS_TEST_UTIL_H_
