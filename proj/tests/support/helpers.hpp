// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "bhtherm/basis.hpp"
#include "bhtherm/hamiltonian.hpp"

namespace testing_support {

inline Eigen::MatrixXd isometry(const bhtherm::FullBasis& full, const bhtherm::SectorBasis& sector) {
  const auto cols = bhtherm::sector_columns(full, sector);
  Eigen::MatrixXd S(static_cast<Eigen::Index>(full.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    S.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(cols[j].data(), S.rows());
  return S;
}

inline Eigen::MatrixXd rotation_matrix(const bhtherm::FullBasis& full) {
  const auto dim = static_cast<Eigen::Index>(full.size());
  Eigen::MatrixXd R(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    std::vector<double> e(full.size(), 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    const auto img = bhtherm::apply_trimer_rotation(full, e);
    R.col(j) = Eigen::Map<const Eigen::VectorXd>(img.data(), dim);
  }
  return R;
}

inline Eigen::MatrixXd dense(const bhtherm::HamiltonianMatrix& h) { return Eigen::MatrixXd(h.matrix); }

}  // namespace testing_support
