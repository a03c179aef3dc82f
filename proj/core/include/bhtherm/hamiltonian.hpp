// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/SparseCore>
#include <iosfwd>
#include <vector>

#include "bhtherm/basis.hpp"

namespace bhtherm {

/// Parameters of the monomer-trimer Bose-Hubbard model. Energies are in
/// units of the trimer hopping Omega, which is fixed to 1.
struct ModelParams {
  double Omega = 1.0;
  double U = 0.0;      ///< on-site interaction, > 0
  double omega = 0.0;  ///< monomer-trimer coupling, >= 0
  int N = 0;           ///< total boson number

  static ModelParams from_interaction(double un_over_omega, int total, double coupling);

  double un_over_omega() const { return U * N / Omega; }

  /// Throws ContractViolation if Omega != 1, U <= 0, omega < 0 or N < 0.
  void validate() const;
};

/// x = trimer / total, kept exact.
struct TrimerFraction {
  int trimer = 0;
  int total = 1;

  double value() const { return static_cast<double>(trimer) / total; }
  auto operator<=>(const TrimerFraction&) const = default;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct HamiltonianMatrix {
  SparseMatrix matrix;
  ModelParams params;

  Eigen::Index dimension() const { return matrix.rows(); }
};

/// Matrix of
///   H = -(Omega/2) sum_{trimer pairs} (a_i^+ a_j + h.c.) + (U/2) sum_i a_i^+2 a_i^2
///       -(omega/2) sum_{i=2..4} (a_1^+ a_i + h.c.)
/// between the symmetry-adapted vectors of `sector`. Entries (i,j) and (j,i)
/// are stored from the same computed value.
HamiltonianMatrix build_hamiltonian(const ModelParams& params, const SectorBasis& sector);

struct UncoupledBlock {
  TrimerFraction x;
  std::vector<std::size_t> indices;  ///< sector indices, ascending
  HamiltonianMatrix block;           ///< restriction of H(omega = 0)
};

/// Partition of the sector by x with the omega = 0 Hamiltonian restricted to
/// each part. Blocks are ordered by ascending x.
std::vector<UncoupledBlock> uncoupled_blocks(const ModelParams& params, const SectorBasis& sector);

/// Coordinate dump: header `dim nnz`, then one `row col value` line per
/// stored entry in row-major order.
void write_coordinate(std::ostream& out, const HamiltonianMatrix& h);

}  // namespace bhtherm
