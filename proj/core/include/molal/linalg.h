// Copyright 2026 The molal Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MOLAL_LINALG_H_
#define MOLAL_LINALG_H_

#include <Eigen/Core>

namespace molal {

// Row-per-sample matrix used for descriptor tables and proxy points.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace molal

#endif  // MOLAL_LINALG_H_
