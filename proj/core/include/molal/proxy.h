// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_PROXY_H_
#define MOLAL_PROXY_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "molal/descriptors.h"
#include "molal/error.h"
#include "molal/linalg.h"

namespace molal {

enum class Scaling {
  kCenter,
  kStandardize,
};

const char *to_string(Scaling s);
Scaling scaling_from_string(std::string_view s);

enum class ProxyErrc {
  kBadArgument,
  kSchemaMismatch,
  kFormat,
};

using ProxyError = CodedError<ProxyErrc>;

// Coordinates in the reduced space.
using ProxyPoint = Vector;

struct PcaModel {
  std::string schema;
  Scaling scaling = Scaling::kStandardize;
  std::vector<double> means;
  std::vector<double> scales;
  // n_components x n_features, orthonormal rows.
  Matrix components;
  // Covariance eigenvalues of the retained components, descending.
  std::vector<double> eigenvalues;
  // eigenvalue / total variance, per retained component.
  std::vector<double> explained;
  // Features with zero variance under standardize; their scale is 1.
  std::vector<int> degenerate_features;

  int n_components() const { return static_cast<int>(components.rows()); }
  int n_features() const { return static_cast<int>(components.cols()); }
};

// PCA through a symmetric eigendecomposition of the sample covariance
// (n - 1 denominator) of the scaled rows. Each component's sign is chosen
// so that its largest-magnitude loading is positive.
PcaModel fit_pca(const Matrix &rows, const std::string &schema, int n_components,
                 Scaling scaling = Scaling::kStandardize);
PcaModel fit_pca(std::span<const DescriptorVector> rows, int n_components,
                 Scaling scaling = Scaling::kStandardize);

ProxyPoint project(const PcaModel &model, const DescriptorVector &v);
ProxyPoint project(const PcaModel &model, std::span<const double> v);
Matrix project_rows(const PcaModel &model, const Matrix &rows);

// Maps a point back to descriptor space (exact when all components kept).
Vector inverse_transform(const PcaModel &model, const ProxyPoint &p);

// Cumulative explained-variance fractions for 1..n_components components.
std::vector<double> explained_variance_report(const PcaModel &model);

nlohmann::json to_json(const PcaModel &model);
PcaModel pca_from_json(const nlohmann::json &j);
void save_pca(const std::filesystem::path &path, const PcaModel &model);
PcaModel load_pca(const std::filesystem::path &path);

}  // namespace molal

#endif  // MOLAL_PROXY_H_
