// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/rings.h"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <map>
#include <set>
#include <utility>

namespace molal::rings {
namespace {

struct Adjacency {
  std::vector<std::vector<Neighbor>> list;

  Adjacency(int n, std::span<const Bond> bonds)
      : list(static_cast<std::size_t>(n)) {
    for (int b = 0; b < static_cast<int>(bonds.size()); ++b) {
      const Bond &bd = bonds[static_cast<std::size_t>(b)];
      list[static_cast<std::size_t>(bd.begin)].push_back({ bd.end, b });
      list[static_cast<std::size_t>(bd.end)].push_back({ bd.begin, b });
    }
  }

  const std::vector<Neighbor> &operator[](int i) const {
    return list[static_cast<std::size_t>(i)];
  }
};

using BitRow = std::vector<std::uint64_t>;

int lowest_bit(const BitRow &row) {
  for (std::size_t w = 0; w < row.size(); ++w) {
    if (row[w] != 0)
      return static_cast<int>(w * 64) + __builtin_ctzll(row[w]);
  }
  return -1;
}

// Incremental GF(2) basis keyed by pivot bit.
class Gf2Basis {
 public:
  explicit Gf2Basis(int bits) : words_((static_cast<std::size_t>(bits) + 63) / 64) { }

  bool insert(BitRow row) {
    while (true) {
      const int pivot = lowest_bit(row);
      if (pivot < 0)
        return false;
      auto it = rows_.find(pivot);
      if (it == rows_.end()) {
        rows_.emplace(pivot, std::move(row));
        return true;
      }
      for (std::size_t w = 0; w < words_; ++w)
        row[w] ^= it->second[w];
    }
  }

  std::size_t words() const { return words_; }

 private:
  std::size_t words_;
  std::map<int, BitRow> rows_;
};

}  // namespace

std::vector<bool> cyclic_bonds(int num_atoms, std::span<const Bond> bonds) {
  const Adjacency adj(num_atoms, bonds);
  std::vector<bool> cyclic(bonds.size(), true);
  std::vector<int> disc(static_cast<std::size_t>(num_atoms), -1);
  std::vector<int> low(static_cast<std::size_t>(num_atoms), 0);
  int timer = 0;

  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next;
  };

  for (int root = 0; root < num_atoms; ++root) {
    if (disc[static_cast<std::size_t>(root)] >= 0)
      continue;
    std::vector<Frame> stack { { root, -1, 0 } };
    disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
    while (!stack.empty()) {
      Frame &f = stack.back();
      const auto &nbrs = adj[f.atom];
      if (f.next < nbrs.size()) {
        const Neighbor nb = nbrs[f.next++];
        if (nb.bond == f.parent_bond)
          continue;
        const auto v = static_cast<std::size_t>(nb.atom);
        if (disc[v] < 0) {
          disc[v] = low[v] = timer++;
          stack.push_back({ nb.atom, nb.bond, 0 });
        } else {
          low[static_cast<std::size_t>(f.atom)] =
              std::min(low[static_cast<std::size_t>(f.atom)], disc[v]);
        }
        continue;
      }
      const Frame done = f;
      stack.pop_back();
      if (!stack.empty()) {
        const auto u = static_cast<std::size_t>(stack.back().atom);
        const auto v = static_cast<std::size_t>(done.atom);
        low[u] = std::min(low[u], low[v]);
        if (low[v] > disc[u])
          cyclic[static_cast<std::size_t>(done.parent_bond)] = false;
      }
    }
  }
  return cyclic;
}

int count_components(int num_atoms, std::span<const Bond> bonds) {
  std::vector<int> parent(static_cast<std::size_t>(num_atoms));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  int components = num_atoms;
  for (const Bond &b: bonds) {
    const int ra = find(b.begin), rb = find(b.end);
    if (ra != rb) {
      parent[static_cast<std::size_t>(ra)] = rb;
      --components;
    }
  }
  return components;
}

std::vector<Ring> minimum_cycle_basis(int num_atoms, std::span<const Bond> bonds,
                                      const std::vector<bool> &cyclic) {
  const int num_bonds = static_cast<int>(bonds.size());
  const int cyclomatic =
      num_bonds - num_atoms + count_components(num_atoms, bonds);
  if (cyclomatic <= 0)
    return {};

  // Ring-bond-only adjacency.
  std::vector<Bond> ring_bonds;
  std::vector<int> ring_bond_ids;
  for (int b = 0; b < num_bonds; ++b) {
    if (cyclic[static_cast<std::size_t>(b)]) {
      ring_bonds.push_back(bonds[static_cast<std::size_t>(b)]);
      ring_bond_ids.push_back(b);
    }
  }
  std::vector<std::vector<Neighbor>> adj(static_cast<std::size_t>(num_atoms));
  for (std::size_t i = 0; i < ring_bonds.size(); ++i) {
    const Bond &bd = ring_bonds[i];
    adj[static_cast<std::size_t>(bd.begin)].push_back({ bd.end, ring_bond_ids[i] });
    adj[static_cast<std::size_t>(bd.end)].push_back({ bd.begin, ring_bond_ids[i] });
  }

  // Horton candidates: for every root and every ring bond (x, y), the cycle
  // path(root, x) + (x, y) + path(y, root) when the two paths are disjoint.
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> candidates;  // sorted bond ids
  std::vector<int> dist(static_cast<std::size_t>(num_atoms));
  std::vector<int> via_bond(static_cast<std::size_t>(num_atoms));
  std::vector<int> pred(static_cast<std::size_t>(num_atoms));

  for (int root = 0; root < num_atoms; ++root) {
    if (adj[static_cast<std::size_t>(root)].empty())
      continue;
    std::fill(dist.begin(), dist.end(), -1);
    dist[static_cast<std::size_t>(root)] = 0;
    pred[static_cast<std::size_t>(root)] = -1;
    via_bond[static_cast<std::size_t>(root)] = -1;
    std::queue<int> queue;
    queue.push(root);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop();
      for (const Neighbor &nb: adj[static_cast<std::size_t>(u)]) {
        const auto v = static_cast<std::size_t>(nb.atom);
        if (dist[v] < 0) {
          dist[v] = dist[static_cast<std::size_t>(u)] + 1;
          pred[v] = u;
          via_bond[v] = nb.bond;
          queue.push(nb.atom);
        }
      }
    }

    auto path_bonds = [&](int target, std::vector<int> &bonds_out,
                          std::vector<int> &atoms_out) {
      for (int a = target; a != root; a = pred[static_cast<std::size_t>(a)]) {
        bonds_out.push_back(via_bond[static_cast<std::size_t>(a)]);
        atoms_out.push_back(a);
      }
    };

    for (std::size_t i = 0; i < ring_bonds.size(); ++i) {
      const int x = ring_bonds[i].begin;
      const int y = ring_bonds[i].end;
      if (dist[static_cast<std::size_t>(x)] < 0 || dist[static_cast<std::size_t>(y)] < 0)
        continue;
      if (via_bond[static_cast<std::size_t>(x)] == ring_bond_ids[i]
          || via_bond[static_cast<std::size_t>(y)] == ring_bond_ids[i])
        continue;
      std::vector<int> bx, by, ax, ay;
      path_bonds(x, bx, ax);
      path_bonds(y, by, ay);
      std::sort(ax.begin(), ax.end());
      std::sort(ay.begin(), ay.end());
      std::vector<int> common;
      std::set_intersection(ax.begin(), ax.end(), ay.begin(), ay.end(),
                            std::back_inserter(common));
      if (!common.empty())
        continue;
      std::vector<int> cycle = bx;
      cycle.insert(cycle.end(), by.begin(), by.end());
      cycle.push_back(ring_bond_ids[i]);
      std::sort(cycle.begin(), cycle.end());
      if (std::adjacent_find(cycle.begin(), cycle.end()) != cycle.end())
        continue;
      if (seen.insert(cycle).second)
        candidates.push_back(std::move(cycle));
    }
  }

  auto atoms_of = [&](const std::vector<int> &cycle) {
    std::vector<int> atoms;
    for (int b: cycle) {
      atoms.push_back(bonds[static_cast<std::size_t>(b)].begin);
      atoms.push_back(bonds[static_cast<std::size_t>(b)].end);
    }
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    return atoms;
  };

  std::vector<std::pair<std::vector<int>, std::vector<int>>> keyed;
  keyed.reserve(candidates.size());
  for (auto &c: candidates)
    keyed.emplace_back(atoms_of(c), std::move(c));
  std::sort(keyed.begin(), keyed.end(), [](const auto &a, const auto &b) {
    if (a.second.size() != b.second.size())
      return a.second.size() < b.second.size();
    if (a.first != b.first)
      return a.first < b.first;
    return a.second < b.second;
  });

  Gf2Basis basis(num_bonds);
  std::vector<Ring> out;
  for (auto &[atoms, cycle]: keyed) {
    BitRow row(basis.words(), 0);
    for (int b: cycle)
      row[static_cast<std::size_t>(b) / 64] |= std::uint64_t { 1 } << (b % 64);
    if (!basis.insert(std::move(row)))
      continue;

    // Walk the cycle to list atoms in ring order.
    Ring ring;
    ring.bonds = cycle;
    std::vector<bool> used(cycle.size(), false);
    int current = bonds[static_cast<std::size_t>(cycle.front())].begin;
    ring.atoms.push_back(current);
    used[0] = true;
    current = bonds[static_cast<std::size_t>(cycle.front())].end;
    for (std::size_t step = 1; step < cycle.size(); ++step) {
      ring.atoms.push_back(current);
      for (std::size_t j = 0; j < cycle.size(); ++j) {
        const Bond &bd = bonds[static_cast<std::size_t>(cycle[j])];
        if (!used[j] && (bd.begin == current || bd.end == current)) {
          used[j] = true;
          current = bd.other(current);
          break;
        }
      }
    }
    out.push_back(std::move(ring));
    if (static_cast<int>(out.size()) == cyclomatic)
      break;
  }
  return out;
}

}  // namespace molal::rings
