// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "bhtherm/linalg.hpp"

#include <lapacke.h>

#include <cmath>

#include <fmt/format.h>

#include "bhtherm/error.hpp"

namespace bhtherm {

namespace {

Eigen::VectorXd run_dsyevd(Eigen::MatrixXd& a, char jobz) {
  const auto n = static_cast<lapack_int>(a.rows());
  require(a.rows() == a.cols(), "symmetric_eigen: matrix must be square");
  Eigen::VectorXd w(a.rows());
  if (n == 0) return w;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', n, a.data(), n, w.data());
  if (info != 0) {
    throw Error(fmt::format("dsyevd failed (info = {}) for a {}x{} matrix, |A|_max = {:.3e}", info,
                            n, n, a.cwiseAbs().maxCoeff()));
  }
  return w;
}

}  // namespace

EigenPairs symmetric_eigen(Eigen::MatrixXd matrix) {
  EigenPairs out;
  out.values = run_dsyevd(matrix, 'V');
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
      // first index wins among components equal to within 1e-12
      const double a = std::abs(matrix(i, j));
      if (a > best * (1.0 + 1e-12)) {
        best = a;
        imax = i;
      }
    }
    if (matrix(imax, j) < 0.0) matrix.col(j) *= -1.0;
  }
  out.vectors = std::move(matrix);
  return out;
}

Eigen::VectorXd symmetric_eigenvalues(Eigen::MatrixXd matrix) { return run_dsyevd(matrix, 'N'); }

}  // namespace bhtherm
