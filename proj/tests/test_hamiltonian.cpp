// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "bhtherm/error.hpp"
#include "bhtherm/hamiltonian.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace bhtherm;

namespace {

ModelParams params(int N, double omega, double UN = 10.0) { return ModelParams::from_interaction(UN, N, omega); }

}  // namespace

TEST(ModelParams, DerivesUFromUN) {
  const auto p = params(40, 0.1);
  EXPECT_DOUBLE_EQ(p.U, 0.25);
  EXPECT_DOUBLE_EQ(p.un_over_omega(), 10.0);
  EXPECT_THROW(params(40, -0.1), ContractViolation);
  EXPECT_THROW(params(40, 0.1, -1.0), ContractViolation);
  EXPECT_THROW(ModelParams::from_interaction(10.0, 0, 0.1), ContractViolation);
}

TEST(Hamiltonian, EqualsProjectedSecondQuantizedOperator) {
  for (int n : {3, 5, 8}) {
    for (double w : {0.0, 0.1, 0.4}) {
      const FullBasis full(4, n);
      const SectorBasis sector(n);
      const auto p = params(n, w);
      const Eigen::MatrixXd Hf = oracle::full_hamiltonian(oracle::from_basis(full), p);
      const Eigen::MatrixXd S = testing_support::isometry(full, sector);
      const Eigen::MatrixXd h = testing_support::dense(build_hamiltonian(p, sector));
      EXPECT_LT((S.transpose() * Hf * S - h).cwiseAbs().maxCoeff(), 1e-12) << n << " " << w;
    }
  }
}

TEST(Hamiltonian, SymmetricAndSparse) {
  const auto h = build_hamiltonian(params(20, 0.1), SectorBasis(20));
  const Eigen::MatrixXd d = testing_support::dense(h);
  EXPECT_LT((d - d.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(h.matrix.nonZeros(), h.dimension() * 16);
}

TEST(Hamiltonian, FullOperatorCommutesWithRotation) {
  for (int n = 1; n <= 6; ++n) {
    const FullBasis full(4, n);
    const Eigen::MatrixXd R = testing_support::rotation_matrix(full);
    const Eigen::MatrixXd H = oracle::full_hamiltonian(oracle::from_basis(full), params(n, 0.3));
    EXPECT_LT((H * R - R * H).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(UncoupledBlocks, PartitionTheSectorByTrimerCount) {
  const SectorBasis sector(16);
  const auto p = params(16, 0.0);
  const auto blocks = uncoupled_blocks(p, sector);
  std::size_t total = 0;
  for (const auto& b : blocks) {
    total += b.indices.size();
    for (auto i : b.indices) EXPECT_EQ(sector.trimer_count(i), b.x.trimer);
    EXPECT_EQ(b.block.dimension(), static_cast<Eigen::Index>(b.indices.size()));
  }
  EXPECT_EQ(total, sector.size());
  // block-diagonal H(0) reassembles to the full uncoupled matrix
  const Eigen::MatrixXd h = testing_support::dense(build_hamiltonian(p, sector));
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(h.rows(), h.cols());
  for (const auto& b : blocks) {
    const Eigen::MatrixXd d = testing_support::dense(b.block);
    for (std::size_t i = 0; i < b.indices.size(); ++i)
      for (std::size_t j = 0; j < b.indices.size(); ++j)
        r(static_cast<Eigen::Index>(b.indices[i]), static_cast<Eigen::Index>(b.indices[j])) =
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  EXPECT_LT((r - h).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Hamiltonian, CoordinateDumpListsEachNonzero) {
  const auto h = build_hamiltonian(params(6, 0.1), SectorBasis(6));
  std::ostringstream out;
  write_coordinate(out, h);
  std::istringstream in(out.str());
  std::string line;
  Eigen::Index lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, h.matrix.nonZeros() + 1);
}
