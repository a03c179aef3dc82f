// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace bhtherm {

struct EigenPairs {
  Eigen::VectorXd values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< orthonormal columns aligned with values
};

/// Full eigendecomposition of a dense real symmetric matrix (LAPACK dsyevd,
/// lower triangle referenced). Each eigenvector is flipped so that its
/// largest-magnitude component is positive (first such index on ties).
/// Throws bhtherm::Error if LAPACK reports non-convergence.
EigenPairs symmetric_eigen(Eigen::MatrixXd matrix);

/// Eigenvalues only (dsyevd with jobz = 'N').
Eigen::VectorXd symmetric_eigenvalues(Eigen::MatrixXd matrix);

}  // namespace bhtherm
