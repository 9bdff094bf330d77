// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/fingerprints.h"

#include <algorithm>
#include <iterator>
#include <utility>

#include "molal/hash.h"

namespace molal {

namespace {

std::uint64_t encode_charge(int charge) { return static_cast<std::uint64_t>(static_cast<std::int64_t>(charge)); }

void extend_paths(const Molecule &mol, int maxlen, std::vector<int> &path, std::vector<bool> &on_path,
                  std::vector<std::vector<int>> &out) {
  if (path.size() > 1 && path.front() < path.back()) out.push_back(path);
  if (static_cast<int>(path.size()) - 1 == maxlen) return;
  for (const Neighbor &nb : mol.neighbors(path.back())) {
    if (on_path[static_cast<std::size_t>(nb.atom)]) continue;
    on_path[static_cast<std::size_t>(nb.atom)] = true;
    path.push_back(nb.atom);
    extend_paths(mol, maxlen, path, on_path, out);
    path.pop_back();
    on_path[static_cast<std::size_t>(nb.atom)] = false;
  }
}

std::vector<std::uint64_t> path_words(const Molecule &mol, std::span<const int> atoms, bool reversed) {
  std::vector<std::uint64_t> words;
  const std::size_t n = atoms.size();
  auto at = [&](std::size_t i) { return atoms[reversed ? n - 1 - i : i]; };
  for (std::size_t i = 0; i < n; ++i) {
    const Atom &a = mol.atom(at(i));
    words.push_back(static_cast<std::uint64_t>(a.atomic_number) << 1 | (a.aromatic ? 1U : 0U));
    if (i + 1 < n) words.push_back(static_cast<std::uint64_t>(mol.bond(mol.find_bond(at(i), at(i + 1))).order));
  }
  return words;
}

}  // namespace

std::string FingerprintKind::to_string() const {
  return (type == kCircular ? "circular(" : "path(") + std::to_string(parameter) + ")";
}

Fingerprint::Fingerprint(FingerprintKind kind, std::vector<std::uint32_t> ids) : kind_(kind), ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool Fingerprint::contains(std::uint32_t id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

std::uint32_t feature_hash(std::span<const std::uint64_t> words) {
  std::uint64_t h = kFnvOffset;
  for (std::uint64_t w : words) h = fnv1a64_u64(w, h);
  return static_cast<std::uint32_t>(h);
}

Fingerprint circular_fingerprint(const Molecule &mol, int radius) {
  if (radius < 0) throw MetricsError(MetricsErrc::kBadArgument, "radius must be non-negative");
  const int n = mol.num_atoms();
  std::vector<std::uint32_t> current(static_cast<std::size_t>(n));
  std::vector<std::uint32_t> all;
  for (int i = 0; i < n; ++i) {
    const Atom &a = mol.atom(i);
    const std::uint64_t words[] = {
        static_cast<std::uint64_t>(a.atomic_number), encode_charge(a.charge),
        static_cast<std::uint64_t>(mol.degree(i)), static_cast<std::uint64_t>(a.hydrogens),
        mol.atom_in_ring(i) ? 1U : 0U,
    };
    current[static_cast<std::size_t>(i)] = feature_hash(words);
  }
  all.insert(all.end(), current.begin(), current.end());
  for (int round = 1; round <= radius; ++round) {
    std::vector<std::uint32_t> next(current.size());
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> env;
      for (const Neighbor &nb : mol.neighbors(i))
        env.emplace_back(static_cast<std::uint64_t>(mol.bond(nb.bond).order),
                         current[static_cast<std::size_t>(nb.atom)]);
      std::sort(env.begin(), env.end());
      std::vector<std::uint64_t> words { static_cast<std::uint64_t>(round), current[static_cast<std::size_t>(i)] };
      for (const auto &[order, id] : env) {
        words.push_back(order);
        words.push_back(id);
      }
      next[static_cast<std::size_t>(i)] = feature_hash(words);
    }
    current = std::move(next);
    all.insert(all.end(), current.begin(), current.end());
  }
  return Fingerprint({FingerprintKind::kCircular, radius}, std::move(all));
}

std::vector<std::vector<int>> enumerate_paths(const Molecule &mol, int maxlen) {
  if (maxlen < 0) throw MetricsError(MetricsErrc::kBadArgument, "maxlen must be non-negative");
  std::vector<std::vector<int>> out;
  std::vector<bool> on_path(static_cast<std::size_t>(mol.num_atoms()), false);
  for (int i = 0; i < mol.num_atoms(); ++i) {
    out.push_back({i});
    std::vector<int> path { i };
    on_path[static_cast<std::size_t>(i)] = true;
    extend_paths(mol, maxlen, path, on_path, out);
    on_path[static_cast<std::size_t>(i)] = false;
  }
  return out;
}

Fingerprint path_fingerprint(const Molecule &mol, int maxlen) {
  std::vector<std::uint32_t> ids;
  for (const auto &path : enumerate_paths(mol, maxlen)) {
    auto fwd = path_words(mol, path, false);
    auto rev = path_words(mol, path, true);
    fwd.insert(fwd.begin(), static_cast<std::uint64_t>(path.size()));
    rev.insert(rev.begin(), static_cast<std::uint64_t>(path.size()));
    ids.push_back(feature_hash(std::min(fwd, rev)));
  }
  return Fingerprint({FingerprintKind::kPath, maxlen}, std::move(ids));
}

Fingerprint fingerprint(const Molecule &mol, FingerprintKind kind) {
  return kind.type == FingerprintKind::kCircular ? circular_fingerprint(mol, kind.parameter)
                                                 : path_fingerprint(mol, kind.parameter);
}

double tanimoto(const Fingerprint &a, const Fingerprint &b) {
  if (!(a.kind() == b.kind()))
    throw MetricsError(MetricsErrc::kKindMismatch,
                       "cannot compare " + a.kind().to_string() + " with " + b.kind().to_string());
  if (a.size() == 0 && b.size() == 0) return 1.0;
  std::size_t common = 0;
  auto i = a.ids().begin();
  auto j = b.ids().begin();
  while (i != a.ids().end() && j != b.ids().end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

}  // namespace molal
