// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file qdyn.hpp
 * @brief Quench dynamics from an uncoupled eigenstate and monomer thermometry.
 *
 * The reduced monomer density matrix is diagonal in x, so everything here
 * works with the population vector P(x). States are propagated exactly in
 * the coupled eigenbasis (hbar = 1); entropies use the natural log (k_B = 1).
 */

#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "bhtherm/spectral.hpp"

namespace bhtherm {

/// Diagonal of the monomer reduced density matrix on the full grid
/// x = k / N, k = 0..N. Grid points absent from the sector carry zero.
struct MonomerDensity {
  int N = 0;
  Eigen::VectorXd p;  ///< size N + 1, indexed by trimer count k
  double t_lo = 0.0;  ///< instant (t_lo == t_hi) or averaging window
  double t_hi = 0.0;
  int samples = 1;

  static MonomerDensity zeros(int total);
  double x(int k) const { return static_cast<double>(k) / N; }
};

struct QuantumState {
  Eigen::VectorXcd coeffs;  ///< amplitudes on the coupled eigenbasis
  std::shared_ptr<const Spectrum> spectrum;
  double time = 0.0;

  /// Amplitudes on the sector basis.
  Eigen::VectorXcd sector_amplitudes() const;
};

/// Index into `levels` of the block-`trimer` level whose eps is nearest to
/// `eps0`; ties go to the lower energy. Throws bhtherm::Error listing the
/// available x values when the block does not exist.
std::size_t select_level(const UncoupledSpectrum& uncoupled, int trimer, double eps0);

/// Trimer count for x0, or bhtherm::Error if x0 * N is not (within 1e-9) an
/// x value present in the sector.
int trimer_for(const UncoupledSpectrum& uncoupled, double x0);

struct InitialState {
  QuantumState state;
  std::size_t level = 0;      ///< index into UncoupledSpectrum::levels
  Eigen::VectorXd sector_vector;
};

/// The uncoupled eigenstate nearest (x0, eps0), expanded in the coupled eigenbasis.
InitialState prepare_initial(const UncoupledSpectrum& uncoupled,
                             std::shared_ptr<const Spectrum> coupled, double x0, double eps0);

/// Multiplies every coefficient by exp(-i E_m t).
QuantumState evolve(const QuantumState& state, double t);

/// P(x) = sum over nu of |<x, nu | psi>|^2. Each uncoupled block is an
/// orthonormal basis of its x subspace, so the sum is taken over sector
/// basis vectors of that x.
MonomerDensity population_distribution(const QuantumState& state, const SectorBasis& sector);

/// P(x) at many times with one pair of dense products.
std::vector<MonomerDensity> population_series(const QuantumState& state, const SectorBasis& sector,
                                              const std::vector<double>& times);

/// -sum p ln p, with 0 ln 0 = 0.
double entropy(const MonomerDensity& density);

/// Arithmetic mean of P(x) at `samples` equally spaced times in [t_lo, t_hi]
/// (end points included), times measured from state.time.
MonomerDensity time_average(const QuantumState& state, const SectorBasis& sector, double t_lo,
                            double t_hi, int samples);

struct ThermalReference {
  MonomerDensity density;
  double E0 = 0.0;
  double DeltaE = 0.0;
};

/// Gaussian microcanonical window over the uncoupled levels:
/// weight exp(-(E - E0)^2 / (2 DeltaE^2)), normalized and summed over nu.
ThermalReference thermal_reference(const UncoupledSpectrum& uncoupled, double E0, double DeltaE);

/// sqrt(sum_x (avg(x) - thermal(x))^2).
double delta_rho(const MonomerDensity& average, const MonomerDensity& thermal);

struct EnergyMoments {
  double mean = 0.0;
  double width = 0.0;  ///< sqrt(<H^2> - <H>^2)
};

/// <H> and width from the quadratic forms v^T H v and |H v|^2.
EnergyMoments energy_moments(const HamiltonianMatrix& h, const Eigen::VectorXd& v);

/// Same quantities from the eigenbasis populations |c_m|^2.
EnergyMoments energy_moments(const QuantumState& state);

struct AveragingOptions {
  double horizon = 2000.0;         ///< T
  double window_start = 0.5;       ///< averaging window [window_start * T, T]
  int samples = 400;
};

/// Everything one quench produces for the thermalization criterion.
struct QuenchResult {
  std::size_t level = 0;
  UncoupledLevel initial;
  EnergyMoments energy;
  MonomerDensity average;             ///< over [window_start * T, T]
  ThermalReference thermal;
  double delta_rho = 0.0;
  double delta_rho_error = 0.0;       ///< |full window - second half of window|
  double entropy_average = 0.0;       ///< entropy of the averaged P(x)
  double entropy_late = 0.0;          ///< mean instantaneous entropy over the window
  double entropy_thermal = 0.0;
};

QuenchResult run_quench(const SectorBasis& sector, const UncoupledSpectrum& uncoupled,
                        const HamiltonianMatrix& h, std::shared_ptr<const Spectrum> coupled,
                        double x0, double eps0, const AveragingOptions& options = {});

}  // namespace bhtherm
