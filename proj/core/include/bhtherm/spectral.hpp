// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file spectral.hpp
 * @brief Exact diagonalization, uncoupled-level labelling and level statistics.
 *
 * Level statistics follow the usual conventions: unfolded nearest-neighbour
 * spacings are compared with exp(-s) (integrable) and the Wigner surmise
 * (pi/2) s exp(-pi s^2 / 4) (chaotic); the adjacent-gap ratio
 * r_i = min(g_i, g_{i+1}) / max(g_i, g_{i+1}) averages to ~0.386 and ~0.53
 * respectively and needs no unfolding.
 */

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "bhtherm/hamiltonian.hpp"
#include "bhtherm/linalg.hpp"

namespace bhtherm {

struct Spectrum {
  Eigen::VectorXd values;   ///< ascending energies
  Eigen::MatrixXd vectors;  ///< columns aligned with values, sector coordinates
  ModelParams params;

  Eigen::Index size() const { return values.size(); }
};

/// Dense full diagonalization with the largest-component-positive sign rule.
Spectrum diagonalize(const HamiltonianMatrix& h);

/// Eigenstate |x, nu> of the omega = 0 Hamiltonian.
struct UncoupledLevel {
  TrimerFraction x;
  int nu = 0;            ///< index within the x block, ascending energy
  double energy = 0.0;
  double eps = 0.0;      ///< (E - min E) / (max E - min E) over the whole sector
  std::size_t block = 0; ///< position in the block list
};

/// Labels every eigenvalue of every block. `block_spectra[k]` must be the
/// diagonalization of `blocks[k].block`.
std::vector<UncoupledLevel> label_uncoupled_levels(const std::vector<UncoupledBlock>& blocks,
                                                   const std::vector<Spectrum>& block_spectra);

/// Blocks, block eigenpairs and labelled levels of H(omega = 0) in one sector.
struct UncoupledSpectrum {
  ModelParams params;  ///< omega set to 0
  std::vector<UncoupledBlock> blocks;
  std::vector<Spectrum> block_spectra;
  std::vector<UncoupledLevel> levels;  ///< block-major, nu ascending

  /// All uncoupled energies, ascending.
  std::vector<double> energies() const;

  /// Sector-coordinate vector of levels[i].
  Eigen::VectorXd sector_vector(std::size_t level, std::size_t sector_dim) const;

  /// Levels of the block with the given trimer count (empty if none).
  std::vector<std::size_t> levels_in_block(int trimer) const;
};

UncoupledSpectrum diagonalize_uncoupled(const ModelParams& params, const SectorBasis& sector);

/// Drops floor(fraction * n) levels from each end of an ascending list.
std::vector<double> trim_edges(std::span<const double> levels, double fraction);

struct UnfoldOptions {
  int degree = 10;
  double edge_fraction = 0.02;
};

/// Unfolded nearest-neighbour spacings. The cumulative level count is fitted
/// with a polynomial of `degree` (Legendre basis on the trimmed energy
/// range); spacings of the mapped levels are rescaled to unit mean. Needs at
/// least 50 levels, otherwise throws bhtherm::Error.
std::vector<double> unfold_spectrum(std::span<const double> levels, const UnfoldOptions& options = {});

struct RatioSeries {
  std::vector<double> r;
  std::size_t skipped_degenerate = 0;  ///< both adjacent gaps exactly zero

  double mean() const;
};

/// Adjacent-gap ratios on raw gaps of an ascending level list. Fewer than
/// three levels yield an empty series.
RatioSeries spacing_ratio(std::span<const double> levels);

struct ChaosCell {
  TrimerFraction x;
  double eps = 0.0;     ///< eps of the window's central level
  double mean_r = 0.0;  ///< NaN when empty
  int n_levels = 0;
  bool empty = false;
};

struct ChaosMap {
  int window = 21;
  std::vector<ChaosCell> cells;
};

/// Sliding window (step 1) of `window` consecutive levels in each x block;
/// each cell holds the mean adjacent-gap ratio inside the window. Blocks
/// smaller than the window, or windows with fewer than 3 levels, give one
/// empty cell.
ChaosMap chaos_map(const UncoupledSpectrum& spectrum, int window = 21);

/// Chaos-map cells averaged onto a regular eps grid per x row.
struct ChaosGrid {
  std::vector<TrimerFraction> xs;
  int eps_bins = 20;
  Eigen::MatrixXd values;  ///< rows = xs, cols = eps bins; NaN where no cell

  int eps_bin(double eps) const;
  int x_row(double x) const;  ///< nearest row
};

ChaosGrid rasterize(const ChaosMap& map, int eps_bins = 20);

/// 4-connected component of grid cells with value > threshold that contains
/// (row, col); empty if that cell itself fails the test.
std::vector<std::pair<int, int>> connected_region(const ChaosGrid& grid, int row, int col,
                                                  double threshold);

struct SpacingWindow {
  bool local = false;
  double eps_lo = 0.2;
  double eps_hi = 0.3;

  static SpacingWindow global() { return {}; }
  static SpacingWindow between(double lo, double hi) { return {true, lo, hi}; }
};

/// Global: (E_max - E_min) / (count - 1). Local: mean gap among consecutive
/// levels whose eps (relative to this list's extremes) lies in [lo, hi].
/// Throws bhtherm::Error if fewer than two levels qualify.
double mean_level_spacing(std::span<const double> levels, const SpacingWindow& window);

}  // namespace bhtherm
