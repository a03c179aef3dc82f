// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file meanfield.hpp
 * @brief Classical (mean-field) limit of the monomer-trimer model.
 *
 * Each mode is a complex amplitude sqrt(n_i) exp(i phi_i). The symmetrized
 * Hamiltonian is
 *
 *   H = -Omega [ sqrt(n2 n3) cos(phi3 - phi2) + sqrt(n3 n4) cos(phi3 - phi4)
 *              + sqrt(n2 n4) cos(phi2 - phi4) ]
 *       + (U/2) sum_i (n_i^2 - 2 n_i) + 3U/2
 *       - omega sum_{i=2..4} sqrt(n1 n_i) cos(phi_i - phi1)
 *
 * with (phi_i, n_i) canonical: dn_i/dt = -dH/dphi_i, dphi_i/dt = dH/dn_i.
 * Trajectories are integrated in q = sqrt(2n) cos(phi), p = sqrt(2n) sin(phi),
 * which is regular at n_i = 0. The classical boson number is N + 2.
 */

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bhtherm/error.hpp"
#include "bhtherm/hamiltonian.hpp"
#include "bhtherm/qdyn.hpp"

namespace bhtherm {

struct ClassicalState {
  std::array<double, kModes> n{};
  std::array<double, kModes> phi{};
  double t = 0.0;

  double total() const { return n[0] + n[1] + n[2] + n[3]; }
  double x() const { return (n[1] + n[2] + n[3]) / total(); }
};

/// Classical boson number for a quantum system of N bosons.
inline double classical_total(int N) { return N + 2.0; }

double hmf_energy(const ClassicalState& s, const ModelParams& params);

struct PhaseSpaceVelocity {
  std::array<double, kModes> ndot{};
  std::array<double, kModes> phidot{};
};

/// Hamilton's equations in (n, phi). Requires every n_i > 0.
PhaseSpaceVelocity equations_of_motion(const ClassicalState& s, const ModelParams& params);

/// Cartesian phase-space point (q1..q4, p1..p4).
using CartesianState = std::array<double, 2 * kModes>;

CartesianState to_cartesian(const ClassicalState& s);
ClassicalState from_cartesian(const CartesianState& z, double t);

/// Right-hand side of the flow in Cartesian variables.
void cartesian_rhs(const CartesianState& z, CartesianState& dz, const ModelParams& params);
double cartesian_energy(const CartesianState& z, const ModelParams& params);

struct IntegratorOptions {
  double abs_tol = 1e-15;
  double rel_tol = 1e-15;
  double energy_tol = 1e-8;  ///< max |H(t) - H(0)| / |H(0)|
  double norm_tol = 1e-10;   ///< max |sum n(t) - sum n(0)|
  double initial_step = 1e-2;
  double min_step = 1e-12;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

struct Trajectory {
  std::vector<ClassicalState> samples;  ///< at the requested times
  double max_energy_drift = 0.0;        ///< relative, over every accepted step
  double max_norm_drift = 0.0;          ///< absolute
  std::size_t steps = 0;
};

/// Adaptive Runge-Kutta-Fehlberg 7(8) integration, sampling the state at
/// each of `times` (ascending, >= s.t). Throws IntegrationError when the step
/// size collapses or a drift bound is exceeded.
Trajectory integrate(const ClassicalState& s, const ModelParams& params,
                     const std::vector<double>& times, const IntegratorOptions& options = {});

/// Convenience form sampling only t_end.
Trajectory integrate(const ClassicalState& s, const ModelParams& params, double t_end,
                     const IntegratorOptions& options = {});

struct SamplingOptions {
  double energy_rel_tol = 1e-8;
  int max_attempts_per_member = 10000;
  double min_acceptance = 1e-3;
  int reachability_probes = 4000;
};

struct Ensemble {
  std::vector<ClassicalState> members;
  std::uint64_t seed = 0;
  double x_target = 0.0;
  double E_target = 0.0;
  double energy_rel_tol = 0.0;
  std::size_t attempts = 0;
  std::size_t phase_solutions = 0;     ///< members placed on the shell via phi2
  std::size_t split_solutions = 0;     ///< members placed via the n2/n3 split

  double acceptance_rate() const {
    return attempts ? static_cast<double>(members.size()) / static_cast<double>(attempts) : 0.0;
  }
};

/// `count` states with n1 = (1 - x) (N + 2), trimer populations uniform on
/// the simplex n2 + n3 + n4 = x (N + 2), uniform phases, and phi2 (fallback:
/// the n2/n3 split) solved so that H = E_target. Member i draws from its own
/// stream seeded by (seed, i), so the result does not depend on threading.
Ensemble sample_microcanonical(const ModelParams& params, double x_target, double E_target,
                               std::size_t count, std::uint64_t seed,
                               const SamplingOptions& options = {});

/// Histogram of x = (n2 + n3 + n4) / sum n over the quantum grid k / N.
MonomerDensity classical_distribution(const std::vector<ClassicalState>& states, int N);

struct EnsembleSeries {
  std::vector<double> times;
  std::vector<MonomerDensity> densities;  ///< one per time
  Eigen::MatrixXd member_window;           ///< members x (N+1): bin occupancy averaged over the window
  MonomerDensity window_average;          ///< mean of densities with t >= window_lo
  double max_energy_drift = 0.0;
  double max_norm_drift = 0.0;
};

/// Integrates every member (OpenMP parallel over members) and bins x at each
/// time. The averaging window is [window_lo, times.back()].
EnsembleSeries evolve_ensemble(const Ensemble& ensemble, const ModelParams& params,
                               const std::vector<double>& times, double window_lo,
                               const IntegratorOptions& options = {});

struct BootstrapEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// delta_rho of the window-averaged classical distribution with a bootstrap
/// standard error over members.
BootstrapEstimate bootstrap_delta_rho(const EnsembleSeries& series, const MonomerDensity& thermal,
                                      int resamples, std::uint64_t seed);

struct SectionSpec {
  double t_end = 2000.0;
  int reference_mode = -1;  ///< -1: monomer when omega > 0, else trimer site 4
  std::size_t max_points = 100000;
};

struct SectionPoint {
  double u = 0.0;  ///< (n3 - n4) / (n2 + n3 + n4)
  double v = 0.0;  ///< phi3 - phi4 in (-pi, pi]
  double t = 0.0;
  std::size_t seed = 0;
};

struct Section {
  std::vector<SectionPoint> points;
  int reference_mode = 0;
  std::string diagnostic;  ///< set when a seed produced no crossings
};

/// Crossings of phi2 - phi_ref = 0 (mod 2 pi) with phi2 - phi_ref increasing,
/// located by bisection on a fixed 7(8) step from the last accepted state.
Section poincare_section(const ModelParams& params, const std::vector<ClassicalState>& seeds,
                         const SectionSpec& spec, const IntegratorOptions& options = {});

}  // namespace bhtherm
