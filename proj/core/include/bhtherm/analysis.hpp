// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file analysis.hpp
 * @brief Coupling sweeps, threshold location and N-scaling studies.
 *
 * A sweep evaluates the time-averaged delta_rho as a function of the
 * monomer-trimer coupling omega. The threshold omega_T is the smallest
 * omega with delta_rho < c.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "bhtherm/fit.hpp"
#include "bhtherm/meanfield.hpp"
#include "bhtherm/qdyn.hpp"
#include "bhtherm/spectral.hpp"

namespace bhtherm {

/// Shared, thread-safe store of sector bases and spectra keyed by
/// (N, UN/Omega, omega). Coupled spectra are dense, so at most `capacity`
/// of them are kept (oldest evicted first).
class SpectrumCache {
 public:
  explicit SpectrumCache(std::size_t capacity = 2) : capacity_(capacity) {}

  std::shared_ptr<const SectorBasis> sector(int N);
  std::shared_ptr<const UncoupledSpectrum> uncoupled(int N, double UN);
  std::shared_ptr<const Spectrum> coupled(int N, double UN, double omega);

  std::size_t diagonalizations() const { return diagonalizations_; }

 private:
  using Key = std::tuple<int, double, double>;
  std::mutex mutex_;
  std::size_t capacity_;
  std::size_t diagonalizations_ = 0;
  std::map<int, std::shared_ptr<const SectorBasis>> sectors_;
  std::map<std::pair<int, double>, std::shared_ptr<const UncoupledSpectrum>> uncoupled_;
  std::map<Key, std::shared_ptr<const Spectrum>> coupled_;
  std::vector<Key> order_;
};

/// One quench point: (N, UN/Omega) model started in the uncoupled level
/// nearest (x0, eps0).
struct QuenchQuery {
  int N = 40;
  double UN = 10.0;
  double x0 = 0.6;
  double eps0 = 0.3;
};

QuenchResult quantum_quench(SpectrumCache& cache, const QuenchQuery& q, double omega,
                            const AveragingOptions& averaging = {});

struct ClassicalRunOptions {
  std::size_t members = 1000;
  std::uint64_t seed = 1;
  AveragingOptions averaging;
  int bootstrap_resamples = 200;
  IntegratorOptions integrator;
  SamplingOptions sampling;
};

struct ClassicalQuench {
  UncoupledLevel initial;
  double E_target = 0.0;
  Ensemble ensemble;
  EnsembleSeries series;
  ThermalReference thermal;       ///< the quantum microcanonical reference
  BootstrapEstimate delta_rho;
  double entropy_average = 0.0;
  double entropy_late = 0.0;
  double entropy_thermal = 0.0;
};

/// Sample times on [0, T] whose last `samples` points fill the window
/// [window_start * T, T].
std::vector<double> classical_times(const AveragingOptions& averaging);

/// Mean-field ensemble at the energy and x of the quantum initial level,
/// compared against the same thermal reference as the quantum run.
ClassicalQuench classical_quench(SpectrumCache& cache, const QuenchQuery& q, double omega,
                                 const ClassicalRunOptions& options = {});

enum class Side { quantum, classical };
const char* to_string(Side side);

struct SweepPoint {
  double omega = 0.0;
  double delta_rho = 0.0;
  double error = 0.0;  ///< time-sampling (quantum) or bootstrap (classical) error
};

using DeltaRhoEvaluator = std::function<SweepPoint(double omega)>;

DeltaRhoEvaluator quantum_evaluator(SpectrumCache& cache, const QuenchQuery& q,
                                    const AveragingOptions& averaging = {});
DeltaRhoEvaluator classical_evaluator(SpectrumCache& cache, const QuenchQuery& q,
                                      const ClassicalRunOptions& options = {});

enum class ThresholdStatus {
  crossing,     ///< omega_T bracketed and interpolated
  upper_bound,  ///< delta_rho < c already at the grid floor; omega_T <= floor
  above_grid,   ///< delta_rho >= c over the whole grid; omega_T > ceiling
};
const char* to_string(ThresholdStatus status);

struct ThresholdOptions {
  double c = 0.1;
  std::vector<double> grid = log_grid(0.01, 1.0, 13);
  int max_bisections = 3;
};

struct ThresholdResult {
  double omega_T = 0.0;  ///< floor for upper_bound, ceiling for above_grid
  double c = 0.1;
  ThresholdStatus status = ThresholdStatus::crossing;
  std::string method;             ///< "interpolation" or "bound"
  std::vector<SweepPoint> sweep;  ///< ascending omega
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// Walks the grid upward until delta_rho < c, bisects the bracketing pair
/// (geometric midpoints) and interpolates monotonically in log omega.
ThresholdResult find_threshold(const DeltaRhoEvaluator& evaluate, const ThresholdOptions& options = {});

struct ScanOptions {
  ThresholdOptions threshold;
  AveragingOptions averaging;
  ClassicalRunOptions classical;
  bool run_quantum = true;
  bool run_classical = true;
};

struct ScanRow {
  double parameter = 0.0;  ///< eps0 or UN/Omega
  std::optional<ThresholdResult> quantum;
  std::optional<ThresholdResult> classical;
  std::string error;       ///< non-empty when a side failed
};

/// omega_T against eps0 at fixed (N, UN, x0). A failing point is recorded and
/// the scan moves on.
std::vector<ScanRow> scan_epsilon(SpectrumCache& cache, const QuenchQuery& base,
                                  const std::vector<double>& eps_values, const ScanOptions& options = {});

/// omega_T against UN/Omega at fixed (N, x0, eps0).
std::vector<ScanRow> scan_interaction(SpectrumCache& cache, const QuenchQuery& base,
                                      const std::vector<double>& un_values,
                                      const ScanOptions& options = {});

struct ScalingOptions {
  double c = 0.1;
  std::vector<double> omega_n_grid = log_grid(0.5, 20.0, 9);  ///< values of omega N / Omega
  AveragingOptions averaging;
};

struct ScalingCurve {
  int N = 0;
  std::vector<SweepPoint> points;      ///< at omega = s / N for s in the grid
  std::optional<double> omega_T_N;     ///< crossing of c in omega N, if bracketed
};

struct ScalingStudy {
  std::vector<ScalingCurve> curves;
  double collapse_metric = 0.0;  ///< max over N pairs of the RMS curve distance
  FitResult fit;                 ///< delta_rho = a / (omega N + b), all points pooled
  double omega_T_N_fit = 0.0;    ///< a / c - b
  double omega_T_N_spread = 0.0; ///< (max - min) / mean over curves with a crossing
};

/// delta_rho(omega, N) on a common grid of omega N. Refuses fewer than four N.
ScalingStudy scaling_study(SpectrumCache& cache, const QuenchQuery& base, const std::vector<int>& Ns,
                           const ScalingOptions& options = {});

/// max over pairs of sqrt(mean_s (d_i(s) - d_j(s))^2); curves share the grid.
double collapse_metric(const std::vector<ScalingCurve>& curves);

struct SpacingRow {
  int N = 0;
  double global = 0.0;
  double local = 0.0;
  std::size_t levels = 0;
};

struct SpacingStudy {
  double x0 = 0.6;
  SpacingWindow local;
  std::vector<SpacingRow> rows;
  FitResult global_fit;  ///< a / N + b / N^2
  FitResult local_fit;
};

/// Mean level spacings of the uncoupled trimer at fixed x0 (the levels of
/// the x0 block): global over all of them, local over those with eps in the
/// window. Refuses fewer than four N.
SpacingStudy spacing_scaling(SpectrumCache& cache, double UN, double x0, const std::vector<int>& Ns,
                             const SpacingWindow& local = SpacingWindow::between(0.2, 0.3));

}  // namespace bhtherm
