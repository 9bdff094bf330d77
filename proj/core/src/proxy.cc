// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#include "molal/proxy.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "molal/io.h"

namespace molal {
namespace {

constexpr int kFormatVersion = 1;

void check_schema(const PcaModel &model, const std::string &schema, std::size_t n) {
  if (schema != model.schema)
    throw ProxyError(ProxyErrc::kSchemaMismatch,
                     "descriptor schema '" + schema + "' does not match model '" + model.schema + "'");
  if (n != static_cast<std::size_t>(model.n_features()))
    throw ProxyError(ProxyErrc::kSchemaMismatch,
                     "expected " + std::to_string(model.n_features()) + " descriptors, got "
                         + std::to_string(n));
}

}  // namespace

const char *to_string(Scaling s) {
  return s == Scaling::kCenter ? "center" : "standardize";
}

Scaling scaling_from_string(std::string_view s) {
  if (s == "center")
    return Scaling::kCenter;
  if (s == "standardize")
    return Scaling::kStandardize;
  throw ValidationError("unknown scaling '" + std::string(s) + "'");
}

PcaModel fit_pca(const Matrix &rows, const std::string &schema, int n_components, Scaling scaling) {
  const Eigen::Index n = rows.rows();
  const Eigen::Index f = rows.cols();
  if (n < 2)
    throw ProxyError(ProxyErrc::kBadArgument, "PCA needs at least two rows");
  if (n_components < 1 || n_components > std::min(n, f))
    throw ProxyError(ProxyErrc::kBadArgument,
                     "n_components must be in [1, min(rows, features)]");
  if (!rows.allFinite())
    throw ProxyError(ProxyErrc::kBadArgument, "descriptor matrix contains non-finite values");

  PcaModel model;
  model.schema = schema;
  model.scaling = scaling;

  const Vector mean = rows.colwise().mean().transpose();
  Matrix x = rows.rowwise() - mean.transpose();
  Vector scale = Vector::Ones(f);
  if (scaling == Scaling::kStandardize) {
    for (Eigen::Index j = 0; j < f; ++j) {
      const double sd = std::sqrt(x.col(j).squaredNorm() / static_cast<double>(n - 1));
      if (sd > 0.0)
        scale(j) = sd;
      else
        model.degenerate_features.push_back(static_cast<int>(j));
    }
    for (Eigen::Index j = 0; j < f; ++j)
      x.col(j) /= scale(j);
  }

  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw ProxyError(ProxyErrc::kBadArgument, "eigendecomposition failed");

  // Eigen returns ascending eigenvalues.
  const Vector evals = solver.eigenvalues();
  const Eigen::MatrixXd evecs = solver.eigenvectors();
  double total = 0.0;
  for (Eigen::Index i = 0; i < f; ++i)
    total += std::max(0.0, evals(i));

  model.components.resize(n_components, f);
  for (int c = 0; c < n_components; ++c) {
    const Eigen::Index src = f - 1 - c;
    Vector v = evecs.col(src);
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < f; ++j) {
      if (std::abs(v(j)) > std::abs(v(arg)))
        arg = j;
    }
    if (v(arg) < 0)
      v = -v;
    model.components.row(c) = v.transpose();
    const double lambda = std::max(0.0, evals(src));
    model.eigenvalues.push_back(lambda);
    model.explained.push_back(total > 0.0 ? lambda / total : 0.0);
  }
  model.means.assign(mean.data(), mean.data() + f);
  model.scales.assign(scale.data(), scale.data() + f);
  return model;
}

PcaModel fit_pca(std::span<const DescriptorVector> rows, int n_components, Scaling scaling) {
  if (rows.empty())
    throw ProxyError(ProxyErrc::kBadArgument, "PCA needs at least two rows");
  const std::string &schema = rows.front().schema();
  const std::size_t f = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(f));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].schema() != schema || rows[i].size() != f)
      throw ProxyError(ProxyErrc::kSchemaMismatch, "rows do not share one schema");
    for (std::size_t j = 0; j < f; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return fit_pca(m, schema, n_components, scaling);
}

ProxyPoint project(const PcaModel &model, std::span<const double> v) {
  if (v.size() != static_cast<std::size_t>(model.n_features()))
    throw ProxyError(ProxyErrc::kSchemaMismatch,
                     "expected " + std::to_string(model.n_features()) + " descriptors, got "
                         + std::to_string(v.size()));
  Vector z(model.n_features());
  for (int j = 0; j < model.n_features(); ++j) {
    const auto u = static_cast<std::size_t>(j);
    z(j) = (v[u] - model.means[u]) / model.scales[u];
  }
  return model.components * z;
}

ProxyPoint project(const PcaModel &model, const DescriptorVector &v) {
  check_schema(model, v.schema(), v.size());
  return project(model, std::span<const double>(v.values()));
}

Matrix project_rows(const PcaModel &model, const Matrix &rows) {
  if (rows.cols() != model.n_features())
    throw ProxyError(ProxyErrc::kSchemaMismatch, "column count does not match the model");
  Matrix z = rows;
  for (int j = 0; j < model.n_features(); ++j) {
    const auto u = static_cast<std::size_t>(j);
    z.col(j) = (z.col(j).array() - model.means[u]) / model.scales[u];
  }
  return z * model.components.transpose();
}

Vector inverse_transform(const PcaModel &model, const ProxyPoint &p) {
  if (p.size() != model.n_components())
    throw ProxyError(ProxyErrc::kSchemaMismatch, "point dimension does not match the model");
  Vector z = model.components.transpose() * p;
  for (int j = 0; j < model.n_features(); ++j) {
    const auto u = static_cast<std::size_t>(j);
    z(j) = z(j) * model.scales[u] + model.means[u];
  }
  return z;
}

std::vector<double> explained_variance_report(const PcaModel &model) {
  std::vector<double> out;
  double acc = 0.0;
  for (double e: model.explained) {
    acc += e;
    out.push_back(std::min(acc, 1.0));
  }
  return out;
}

nlohmann::json to_json(const PcaModel &model) {
  nlohmann::json comps = nlohmann::json::array();
  for (int c = 0; c < model.n_components(); ++c) {
    std::vector<double> row(model.components.row(c).data(),
                            model.components.row(c).data() + model.n_features());
    comps.push_back(row);
  }
  return {
    {"format", "molal-pca"},
    {"version", kFormatVersion},
    {"schema", model.schema},
    {"scaling", to_string(model.scaling)},
    {"means", model.means},
    {"scales", model.scales},
    {"components", comps},
    {"eigenvalues", model.eigenvalues},
    {"explained", model.explained},
    {"degenerate_features", model.degenerate_features},
  };
}

PcaModel pca_from_json(const nlohmann::json &j) {
  try {
    if (j.at("format") != "molal-pca" || j.at("version").get<int>() != kFormatVersion)
      throw ProxyError(ProxyErrc::kFormat, "not a version 1 PCA model");
    PcaModel m;
    m.schema = j.at("schema").get<std::string>();
    m.scaling = scaling_from_string(j.at("scaling").get<std::string>());
    m.means = j.at("means").get<std::vector<double>>();
    m.scales = j.at("scales").get<std::vector<double>>();
    m.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    m.explained = j.at("explained").get<std::vector<double>>();
    m.degenerate_features = j.at("degenerate_features").get<std::vector<int>>();
    const auto rows = j.at("components").get<std::vector<std::vector<double>>>();
    const auto f = static_cast<Eigen::Index>(m.means.size());
    m.components.resize(static_cast<Eigen::Index>(rows.size()), f);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<Eigen::Index>(rows[r].size()) != f)
        throw ProxyError(ProxyErrc::kFormat, "component row has the wrong length");
      for (Eigen::Index c = 0; c < f; ++c)
        m.components(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    }
    if (m.scales.size() != m.means.size() || m.eigenvalues.size() != rows.size())
      throw ProxyError(ProxyErrc::kFormat, "inconsistent PCA model sizes");
    return m;
  } catch (const nlohmann::json::exception &e) {
    throw ProxyError(ProxyErrc::kFormat, std::string("malformed PCA model: ") + e.what());
  }
}

void save_pca(const std::filesystem::path &path, const PcaModel &model) {
  write_file(path, to_json(model).dump(1));
}

PcaModel load_pca(const std::filesystem::path &path) {
  try {
    return pca_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error &e) {
    throw ProxyError(ProxyErrc::kFormat, path.string() + ": " + e.what());
  }
}

}  // namespace molal
