// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

// Reference implementations used by the unit and acceptance tests. They
// favour plain loops over speed and share no code with the library beyond
// its data types.

#ifndef MOLAL_TESTS_ORACLES_H_
#define MOLAL_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "molal/filters.h"
#include "molal/molecule.h"

namespace molal::oracle {

using Dense = std::vector<std::vector<double>>;

// Cyclic Jacobi rotations on a symmetric matrix. Eigenvalues come back in
// descending order; vectors[j] is the unit eigenvector for values[j].
struct EigenPairs {
  std::vector<double> values;
  Dense vectors;
};

inline EigenPairs jacobi_eigen(Dense a, int sweeps = 100) {
  const std::size_t n = a.size();
  Dense v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    v[i][i] = 1.0;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        off += a[p][q] * a[p][q];
    if (off < 1e-30)
      break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300)
          continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&a](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  EigenPairs out;
  for (std::size_t j: order) {
    out.values.push_back(a[j][j]);
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k)
      col[k] = v[k][j];
    out.vectors.push_back(std::move(col));
  }
  return out;
}

// Sample covariance of the rows after optional standardization.
inline Dense covariance(const Dense &rows, bool standardize) {
  const std::size_t n = rows.size(), d = rows[0].size();
  std::vector<double> mean(d, 0.0), sd(d, 1.0);
  for (const auto &r: rows)
    for (std::size_t j = 0; j < d; ++j)
      mean[j] += r[j] / static_cast<double>(n);
  if (standardize) {
    for (std::size_t j = 0; j < d; ++j) {
      double ss = 0.0;
      for (const auto &r: rows)
        ss += (r[j] - mean[j]) * (r[j] - mean[j]);
      sd[j] = std::sqrt(ss / static_cast<double>(n - 1));
      if (sd[j] == 0.0)
        sd[j] = 1.0;
    }
  }
  Dense c(d, std::vector<double>(d, 0.0));
  for (const auto &r: rows)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        c[i][j] += (r[i] - mean[i]) / sd[i] * (r[j] - mean[j]) / sd[j] / static_cast<double>(n - 1);
  return c;
}

// Direct evaluation of the allocation law: round half up, cap, trim the
// overshoot one unit at a time from the largest positive excess, then pour
// the shortfall into clusters with room in proportion to their fractions,
// floors first and leftovers by largest remainder.
inline std::vector<int> waterfall_quotas(const std::vector<double> &f, int target,
                                         const std::vector<int> &pop) {
  const std::size_t k = f.size();
  std::vector<int> q(k);
  long long room = 0;
  for (std::size_t i = 0; i < k; ++i) {
    q[i] = std::min(pop[i], static_cast<int>(std::floor(f[i] * target + 0.5)));
    if (f[i] > 0)
      room += pop[i];
  }
  const long long goal = std::min<long long>(target, room);
  auto total = [&q] { return std::accumulate(q.begin(), q.end(), 0LL); };
  while (total() > goal) {
    std::size_t best = 0;
    bool found = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (q[i] == 0)
        continue;
      if (!found || q[i] - f[i] * target > q[best] - f[best] * target) {
        best = i;
        found = true;
      }
    }
    q[best] -= 1;
  }
  for (std::size_t round = 0; round <= k; ++round) {
    const long long need = goal - total();
    if (need <= 0)
      break;
    double weight = 0.0;
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < k; ++i)
      if (f[i] > 0 && q[i] < pop[i]) {
        open.push_back(i);
        weight += f[i];
      }
    if (open.empty())
      break;
    std::vector<std::pair<double, std::size_t>> leftovers;
    for (std::size_t i: open) {
      const double share = static_cast<double>(need) * f[i] / weight;
      q[i] += static_cast<int>(std::min<double>(pop[i] - q[i], std::floor(share)));
      leftovers.emplace_back(share - std::floor(share), i);
    }
    std::stable_sort(leftovers.begin(), leftovers.end(),
                     [](const auto &x, const auto &y) { return x.first > y.first; });
    for (const auto &[r, i]: leftovers)
      if (total() < goal && q[i] < pop[i])
        q[i] += 1;
  }
  return q;
}

// Lowest-inertia five, then smallest size variance; ties by inertia and
// then by position.
inline std::size_t two_stage_select(const std::vector<std::pair<double, double>> &iv) {
  std::vector<std::size_t> idx(iv.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&iv](std::size_t a, std::size_t b) { return iv[a].first < iv[b].first; });
  idx.resize(std::min<std::size_t>(5, idx.size()));
  std::stable_sort(idx.begin(), idx.end(), [&iv](std::size_t a, std::size_t b) {
    if (iv[a].second != iv[b].second)
      return iv[a].second < iv[b].second;
    if (iv[a].first != iv[b].first)
      return iv[a].first < iv[b].first;
    return a < b;
  });
  return idx[0];
}

inline double pearson_direct(const std::vector<double> &x, const std::vector<double> &y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Quantile from the sorted sample at position q * (n - 1).
inline double sorted_quantile(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

inline bool atom_satisfies(const Molecule &mol, int atom, const AtomQuery &q) {
  const Atom &a = mol.atom(atom);
  const int degree = static_cast<int>(mol.neighbors(atom).size());
  if (q.atomic_number && *q.atomic_number != a.atomic_number)
    return false;
  if (q.charge && *q.charge != a.charge)
    return false;
  if (q.aromatic && *q.aromatic != a.aromatic)
    return false;
  if (q.h_count && *q.h_count != a.hydrogens)
    return false;
  if (q.degree && *q.degree != degree)
    return false;
  if (q.connectivity && *q.connectivity != degree + a.hydrogens)
    return false;
  return true;
}

// Tries every injective assignment of pattern atoms to molecule atoms.
inline bool brute_force_match(const Molecule &mol, const MotifPattern &pattern) {
  const int n = mol.num_atoms();
  const int m = static_cast<int>(pattern.atoms.size());
  if (m > n)
    return false;
  std::vector<int> map(static_cast<std::size_t>(m), 0);
  while (true) {
    std::set<int> used(map.begin(), map.end());
    if (static_cast<int>(used.size()) == m) {
      bool ok = true;
      for (int i = 0; i < m && ok; ++i)
        ok = atom_satisfies(mol, map[static_cast<std::size_t>(i)], pattern.atoms[static_cast<std::size_t>(i)]);
      for (const BondQuery &b: pattern.bonds) {
        if (!ok)
          break;
        const int bond = mol.find_bond(map[static_cast<std::size_t>(b.a)], map[static_cast<std::size_t>(b.b)]);
        ok = bond >= 0 && (!b.order || *b.order == mol.bond(bond).order);
      }
      if (ok)
        return true;
    }
    int pos = m - 1;
    while (pos >= 0 && map[static_cast<std::size_t>(pos)] == n - 1)
      map[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0)
      return false;
    ++map[static_cast<std::size_t>(pos)];
  }
}

// Number of simple paths with 0..maxlen bonds in a path graph of n atoms.
inline std::size_t chain_path_count(int n, int maxlen) {
  std::size_t total = 0;
  for (int l = 0; l <= std::min(maxlen, n - 1); ++l)
    total += static_cast<std::size_t>(n - l);
  return total;
}

}  // namespace molal::oracle

#endif  // MOLAL_TESTS_ORACLES_H_
