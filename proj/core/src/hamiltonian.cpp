// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "bhtherm/hamiltonian.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "bhtherm/error.hpp"

namespace bhtherm {

ModelParams ModelParams::from_interaction(double un_over_omega, int total, double coupling) {
  require(total > 0, "ModelParams: N must be positive to derive U from UN/Omega");
  ModelParams p;
  p.N = total;
  p.U = un_over_omega / total;
  p.omega = coupling;
  p.validate();
  return p;
}

void ModelParams::validate() const {
  require(Omega == 1.0, "ModelParams: Omega is the energy unit and must equal 1");
  require(U > 0.0, "ModelParams: U must be > 0 (repulsive interaction)");
  require(omega >= 0.0, "ModelParams: omega must be >= 0");
  require(N >= 0, "ModelParams: N must be >= 0");
}

namespace {

constexpr std::array<std::pair<int, int>, 3> kTrimerBonds{{{1, 2}, {2, 3}, {3, 1}}};

// Appends a_to^+ a_from |s> with weight `coefficient`.
void hop(const FockState& s, int to, int from, double coefficient,
         std::vector<std::pair<FockState, double>>& out) {
  if (s.n[from] == 0 || coefficient == 0.0) return;
  FockState t = s;
  const double amp = std::sqrt(static_cast<double>(t.n[from]) * (t.n[to] + 1));
  t.n[from] -= 1;
  t.n[to] += 1;
  out.emplace_back(t, coefficient * amp);
}

}  // namespace

HamiltonianMatrix build_hamiltonian(const ModelParams& params, const SectorBasis& sector) {
  params.validate();
  require(params.N == sector.total(),
          fmt::format("build_hamiltonian: params.N = {} but sector built for N = {}", params.N,
                      sector.total()));

  const auto dim = static_cast<Eigen::Index>(sector.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(sector.size() * 12);
  std::vector<std::pair<FockState, double>> image;

  for (std::size_t r = 0; r < sector.size(); ++r) {
    const FockState& rep = sector.representative(r);
    image.clear();

    double diag = 0.0;
    for (int n : rep.n) diag += 0.5 * params.U * n * (n - 1);
    image.emplace_back(rep, diag);

    for (auto [i, j] : kTrimerBonds) {
      hop(rep, i, j, -0.5 * params.Omega, image);
      hop(rep, j, i, -0.5 * params.Omega, image);
    }
    for (int i = 1; i <= 3; ++i) {
      hop(rep, 0, i, -0.5 * params.omega, image);
      hop(rep, i, 0, -0.5 * params.omega, image);
    }

    // Column r of the sector matrix: H_{s r} = sum_f <f|H|r> sign(f -> s).
    std::map<std::size_t, double> column;
    for (const auto& [state, amp] : image) {
      if (auto loc = sector.locate(state)) column[loc->first] += loc->second * amp;
    }
    for (const auto& [s, value] : column) {
      if (s < r || value == 0.0) continue;
      const auto si = static_cast<Eigen::Index>(s);
      const auto ri = static_cast<Eigen::Index>(r);
      triplets.emplace_back(ri, si, value);
      if (s != r) triplets.emplace_back(si, ri, value);
    }
  }

  HamiltonianMatrix h;
  h.params = params;
  h.matrix.resize(dim, dim);
  h.matrix.setFromTriplets(triplets.begin(), triplets.end());
  h.matrix.makeCompressed();
  return h;
}

std::vector<UncoupledBlock> uncoupled_blocks(const ModelParams& params, const SectorBasis& sector) {
  ModelParams p0 = params;
  p0.omega = 0.0;
  const HamiltonianMatrix h0 = build_hamiltonian(p0, sector);

  std::map<int, std::vector<std::size_t>> by_trimer;
  for (std::size_t i = 0; i < sector.size(); ++i) by_trimer[sector.trimer_count(i)].push_back(i);

  std::vector<UncoupledBlock> blocks;
  blocks.reserve(by_trimer.size());
  for (auto& [trimer, indices] : by_trimer) {
    UncoupledBlock b;
    b.x = TrimerFraction{trimer, params.N};
    b.indices = std::move(indices);
    std::map<std::size_t, Eigen::Index> local;
    for (std::size_t k = 0; k < b.indices.size(); ++k)
      local.emplace(b.indices[k], static_cast<Eigen::Index>(k));

    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t k = 0; k < b.indices.size(); ++k) {
      const auto row = static_cast<Eigen::Index>(b.indices[k]);
      for (SparseMatrix::InnerIterator it(h0.matrix, row); it; ++it) {
        auto found = local.find(static_cast<std::size_t>(it.col()));
        require(found != local.end(), "uncoupled_blocks: H(omega=0) couples different x");
        triplets.emplace_back(static_cast<Eigen::Index>(k), found->second, it.value());
      }
    }
    const auto n = static_cast<Eigen::Index>(b.indices.size());
    b.block.params = p0;
    b.block.matrix.resize(n, n);
    b.block.matrix.setFromTriplets(triplets.begin(), triplets.end());
    b.block.matrix.makeCompressed();
    blocks.push_back(std::move(b));
  }
  return blocks;
}

void write_coordinate(std::ostream& out, const HamiltonianMatrix& h) {
  out << h.matrix.rows() << ' ' << h.matrix.nonZeros() << '\n';
  for (Eigen::Index r = 0; r < h.matrix.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(h.matrix, r); it; ++it)
      out << fmt::format("{} {} {:.17g}\n", it.row(), it.col(), it.value());
  }
}

}  // namespace bhtherm
