// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_CLUSTERING_H_
#define MOLAL_CLUSTERING_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "molal/error.h"
#include "molal/linalg.h"

namespace molal {

enum class ClusteringErrc {
  kTooFewPoints,
  kBadArgument,
  kFormat,
};

using ClusteringError = CodedError<ClusteringErrc>;

struct Clustering {
  int k = 0;
  Matrix centroids;              // k x dim
  std::vector<int> assignments;  // per point, in [0, k)
  double inertia = 0.0;          // sum of squared distances to assigned centroid
  double size_variance = 0.0;    // population variance of cluster sizes
  std::vector<double> inertia_trace;  // after every assignment step
  int iterations = 0;

  std::vector<int> sizes() const;
};

struct KMeansOptions {
  int max_iterations = 300;
};

// k-means++ seeding: first centre uniform, then proportional to squared
// distance to the nearest chosen centre.
Matrix kmeanspp_seed(const Matrix &points, int k, std::mt19937_64 &rng);

// Lloyd iterations from the given centres until the assignment is a fixed
// point or max_iterations is reached. Ties go to the lower cluster id.
// Clusters left empty by an update are moved onto the point farthest from
// its centre.
Clustering lloyd(const Matrix &points, Matrix centroids, const KMeansOptions &options = {});

Clustering kmeans(const Matrix &points, int k, std::uint64_t seed,
                  const KMeansOptions &options = {});

// Restart r uses derive_seed(seed, r), so results do not depend on order.
std::vector<Clustering> kmeans_restarts(const Matrix &points, int k, int restarts,
                                        std::uint64_t seed, const KMeansOptions &options = {});

// Among the min(5, n) lowest-inertia candidates, the one with the smallest
// size variance; ties by inertia, then by position.
std::size_t select_clustering_index(std::span<const std::pair<double, double>> inertia_variance);
std::size_t select_clustering_index(std::span<const Clustering> candidates);
const Clustering &select_clustering(std::span<const Clustering> candidates);

double recompute_inertia(const Matrix &points, const Clustering &c);
double cluster_size_variance(std::span<const int> assignments, int k);

struct ScoringPick {
  int point;
  int cluster;
  friend bool operator==(const ScoringPick &, const ScoringPick &) = default;
};

struct ScoringSample {
  std::vector<ScoringPick> picks;  // sorted by point index
  std::size_t target = 0;
};

// Phase 1 takes min(size, per_cluster) from every cluster. If that exceeds
// `total` it is randomly thinned to `total`; otherwise the shortfall is
// drawn uniformly from the unsampled members of clusters larger than
// per_cluster.
ScoringSample sample_for_scoring(std::span<const int> assignments, int k, int per_cluster,
                                 int total, std::mt19937_64 &rng);
ScoringSample sample_for_scoring(const Clustering &clustering, int per_cluster, int total,
                                 std::mt19937_64 &rng);

void save_clustering(const std::filesystem::path &path, const Clustering &c);
Clustering load_clustering(const std::filesystem::path &path);

// "size,count" rows for every occurring cluster size.
void write_size_histogram(const std::filesystem::path &path, const Clustering &c);

}  // namespace molal

#endif  // MOLAL_CLUSTERING_H_
