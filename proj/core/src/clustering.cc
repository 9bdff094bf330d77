// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/clustering.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "molal/hash.h"
#include "molal/io.h"
#include "molal/stats.h"

namespace molal {
namespace {

constexpr char kMagic[8] = {'M', 'O', 'L', 'C', 'L', 'U', 'S', '1'};

// Nearest centroid per point; returns inertia.
double assign(const Matrix &points, const Matrix &centroids, std::vector<int> &out,
              std::vector<double> &dist) {
  const Eigen::Index n = points.rows();
  const Eigen::Index k = centroids.rows();
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < k; ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    out[static_cast<std::size_t>(i)] = best;
    dist[static_cast<std::size_t>(i)] = best_d;
    inertia += best_d;
  }
  return inertia;
}

template <class T>
void put(std::ostream &out, const T &v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof v);
}

template <class T>
T get(std::istream &in) {
  T v{};
  in.read(reinterpret_cast<char *>(&v), sizeof v);
  if (!in)
    throw ClusteringError(ClusteringErrc::kFormat, "truncated clustering file");
  return v;
}

}  // namespace

std::vector<int> Clustering::sizes() const {
  std::vector<int> s(static_cast<std::size_t>(k), 0);
  for (int a: assignments)
    ++s[static_cast<std::size_t>(a)];
  return s;
}

double cluster_size_variance(std::span<const int> assignments, int k) {
  std::vector<double> s(static_cast<std::size_t>(k), 0.0);
  for (int a: assignments)
    s[static_cast<std::size_t>(a)] += 1.0;
  return stats::population_variance(s);
}

Matrix kmeanspp_seed(const Matrix &points, int k, std::mt19937_64 &rng) {
  const Eigen::Index n = points.rows();
  Matrix centroids(k, points.cols());
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Eigen::Index chosen = pick(rng);
  for (int c = 0; c < k; ++c) {
    if (c > 0) {
      const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
      if (total > 0.0) {
        std::discrete_distribution<Eigen::Index> weighted(d2.begin(), d2.end());
        chosen = weighted(rng);
      } else {
        chosen = pick(rng);
      }
    }
    centroids.row(c) = points.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], d);
    }
  }
  return centroids;
}

Clustering lloyd(const Matrix &points, Matrix centroids, const KMeansOptions &options) {
  const Eigen::Index n = points.rows();
  const int k = static_cast<int>(centroids.rows());
  if (k < 1 || n < k)
    throw ClusteringError(ClusteringErrc::kTooFewPoints, "need at least k points");

  Clustering out;
  out.k = k;
  out.assignments.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
  out.inertia = assign(points, centroids, out.assignments, dist);
  out.inertia_trace.push_back(out.inertia);

  std::vector<int> next(out.assignments.size());
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    Matrix sum = Matrix::Zero(k, points.cols());
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int a = out.assignments[static_cast<std::size_t>(i)];
      sum.row(a) += points.row(i);
      ++count[static_cast<std::size_t>(a)];
    }
    std::vector<int> empty;
    for (int c = 0; c < k; ++c) {
      if (count[static_cast<std::size_t>(c)] > 0)
        centroids.row(c) = sum.row(c) / static_cast<double>(count[static_cast<std::size_t>(c)]);
      else
        empty.push_back(c);
    }
    if (!empty.empty()) {
      std::vector<double> far(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i)
        far[static_cast<std::size_t>(i)] =
            (points.row(i) - centroids.row(out.assignments[static_cast<std::size_t>(i)])).squaredNorm();
      std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&far](Eigen::Index a, Eigen::Index b) {
        return far[static_cast<std::size_t>(a)] > far[static_cast<std::size_t>(b)];
      });
      for (std::size_t e = 0; e < empty.size(); ++e)
        centroids.row(empty[e]) = points.row(order[e]);
    }

    const double inertia = assign(points, centroids, next, dist);
    out.inertia_trace.push_back(inertia);
    out.inertia = inertia;
    out.iterations = iter + 1;
    const bool fixed = next == out.assignments;
    out.assignments.swap(next);
    if (fixed)
      break;
  }
  out.centroids = std::move(centroids);
  out.size_variance = cluster_size_variance(out.assignments, k);
  return out;
}

Clustering kmeans(const Matrix &points, int k, std::uint64_t seed, const KMeansOptions &options) {
  if (k < 1)
    throw ClusteringError(ClusteringErrc::kBadArgument, "k must be positive");
  if (points.rows() < k)
    throw ClusteringError(ClusteringErrc::kTooFewPoints,
                          std::to_string(points.rows()) + " points for k = " + std::to_string(k));
  std::mt19937_64 rng(seed);
  return lloyd(points, kmeanspp_seed(points, k, rng), options);
}

std::vector<Clustering> kmeans_restarts(const Matrix &points, int k, int restarts,
                                        std::uint64_t seed, const KMeansOptions &options) {
  if (restarts < 1)
    throw ClusteringError(ClusteringErrc::kBadArgument, "restarts must be at least 1");
  std::vector<Clustering> out;
  out.reserve(static_cast<std::size_t>(restarts));
  for (int r = 0; r < restarts; ++r)
    out.push_back(kmeans(points, k, derive_seed(seed, static_cast<std::uint64_t>(r)), options));
  return out;
}

std::size_t select_clustering_index(std::span<const std::pair<double, double>> iv) {
  if (iv.empty())
    throw ClusteringError(ClusteringErrc::kBadArgument, "no candidate clusterings");
  std::vector<std::size_t> idx(iv.size());
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t keep = std::min<std::size_t>(5, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                    [&iv](std::size_t a, std::size_t b) {
                      return std::pair(iv[a].first, a) < std::pair(iv[b].first, b);
                    });
  return *std::min_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep),
                           [&iv](std::size_t a, std::size_t b) {
                             return std::tuple(iv[a].second, iv[a].first, a)
                                    < std::tuple(iv[b].second, iv[b].first, b);
                           });
}

std::size_t select_clustering_index(std::span<const Clustering> candidates) {
  std::vector<std::pair<double, double>> iv;
  for (const Clustering &c: candidates)
    iv.emplace_back(c.inertia, c.size_variance);
  return select_clustering_index(iv);
}

const Clustering &select_clustering(std::span<const Clustering> candidates) {
  return candidates[select_clustering_index(candidates)];
}

double recompute_inertia(const Matrix &points, const Clustering &c) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    s += (points.row(i) - c.centroids.row(c.assignments[static_cast<std::size_t>(i)])).squaredNorm();
  return s;
}

ScoringSample sample_for_scoring(std::span<const int> assignments, int k, int per_cluster,
                                 int total, std::mt19937_64 &rng) {
  if (per_cluster < 1)
    throw ClusteringError(ClusteringErrc::kBadArgument, "per_cluster must be at least 1");
  if (total < 0)
    throw ClusteringError(ClusteringErrc::kBadArgument, "total must be non-negative");

  std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    const int a = assignments[i];
    if (a < 0 || a >= k)
      throw ClusteringError(ClusteringErrc::kBadArgument, "assignment out of range");
    members[static_cast<std::size_t>(a)].push_back(static_cast<int>(i));
  }

  std::vector<ScoringPick> chosen;
  std::vector<ScoringPick> remainder;
  for (int c = 0; c < k; ++c) {
    auto &m = members[static_cast<std::size_t>(c)];
    std::shuffle(m.begin(), m.end(), rng);
    const std::size_t take = std::min(m.size(), static_cast<std::size_t>(per_cluster));
    for (std::size_t j = 0; j < m.size(); ++j)
      (j < take ? chosen : remainder).push_back({m[j], c});
  }

  const auto target = static_cast<std::size_t>(total);
  if (chosen.size() > target) {
    std::shuffle(chosen.begin(), chosen.end(), rng);
    chosen.resize(target);
  } else {
    const std::size_t extra = std::min(target - chosen.size(), remainder.size());
    std::shuffle(remainder.begin(), remainder.end(), rng);
    chosen.insert(chosen.end(), remainder.begin(), remainder.begin() + static_cast<std::ptrdiff_t>(extra));
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const ScoringPick &a, const ScoringPick &b) { return a.point < b.point; });
  return {std::move(chosen), target};
}

ScoringSample sample_for_scoring(const Clustering &clustering, int per_cluster, int total,
                                 std::mt19937_64 &rng) {
  return sample_for_scoring(clustering.assignments, clustering.k, per_cluster, total, rng);
}

void save_clustering(const std::filesystem::path &path, const Clustering &c) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(kMagic, sizeof kMagic);
  put<std::int32_t>(out, c.k);
  put<std::int64_t>(out, static_cast<std::int64_t>(c.assignments.size()));
  put<std::int64_t>(out, c.centroids.cols());
  put<double>(out, c.inertia);
  put<double>(out, c.size_variance);
  put<std::int32_t>(out, c.iterations);
  for (Eigen::Index i = 0; i < c.centroids.rows(); ++i)
    for (Eigen::Index j = 0; j < c.centroids.cols(); ++j)
      put<double>(out, c.centroids(i, j));
  for (int a: c.assignments)
    put<std::int32_t>(out, a);
  put<std::int64_t>(out, static_cast<std::int64_t>(c.inertia_trace.size()));
  for (double v: c.inertia_trace)
    put<double>(out, v);
  if (!out)
    throw IoError("write to '" + path.string() + "' failed");
}

Clustering load_clustering(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path.string() + "'");
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw ClusteringError(ClusteringErrc::kFormat, path.string() + " is not a clustering file");
  Clustering c;
  c.k = get<std::int32_t>(in);
  const auto n = get<std::int64_t>(in);
  const auto dim = get<std::int64_t>(in);
  if (c.k < 1 || n < 0 || dim < 0)
    throw ClusteringError(ClusteringErrc::kFormat, "corrupt clustering header");
  c.inertia = get<double>(in);
  c.size_variance = get<double>(in);
  c.iterations = get<std::int32_t>(in);
  c.centroids.resize(c.k, dim);
  for (Eigen::Index i = 0; i < c.k; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      c.centroids(i, j) = get<double>(in);
  c.assignments.resize(static_cast<std::size_t>(n));
  for (auto &a: c.assignments) {
    a = get<std::int32_t>(in);
    if (a < 0 || a >= c.k)
      throw ClusteringError(ClusteringErrc::kFormat, "assignment out of range");
  }
  const auto t = get<std::int64_t>(in);
  for (std::int64_t i = 0; i < t; ++i)
    c.inertia_trace.push_back(get<double>(in));
  return c;
}

void write_size_histogram(const std::filesystem::path &path, const Clustering &c) {
  std::map<int, int> hist;
  for (int s: c.sizes())
    ++hist[s];
  std::string out = "size,count\n";
  for (const auto &[size, count]: hist)
    out += std::to_string(size) + "," + std::to_string(count) + "\n";
  write_file(path, out);
}

}  // namespace molal
