// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "bhtherm/qdyn.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "bhtherm/error.hpp"

namespace bhtherm {

MonomerDensity MonomerDensity::zeros(int total) {
  MonomerDensity d;
  d.N = total;
  d.p = Eigen::VectorXd::Zero(total + 1);
  return d;
}

Eigen::VectorXcd QuantumState::sector_amplitudes() const {
  const Eigen::MatrixXd& v = spectrum->vectors;
  Eigen::VectorXcd out(v.rows());
  out.real() = v * coeffs.real();
  out.imag() = v * coeffs.imag();
  return out;
}

namespace {

std::string available_x(const UncoupledSpectrum& u) {
  std::string s;
  for (const auto& b : u.blocks) s += fmt::format("{}{}/{}", s.empty() ? "" : ", ", b.x.trimer, b.x.total);
  return s;
}

}  // namespace

int trimer_for(const UncoupledSpectrum& uncoupled, double x0) {
  const int N = uncoupled.params.N;
  const double k = x0 * N;
  const int trimer = static_cast<int>(std::lround(k));
  const bool present = std::any_of(uncoupled.blocks.begin(), uncoupled.blocks.end(),
                                   [&](const UncoupledBlock& b) { return b.x.trimer == trimer; });
  if (std::abs(k - trimer) > 1e-9 || !present) {
    throw Error(fmt::format("x0 = {} is not an x value of the N = {} sector; available: {}", x0, N,
                            available_x(uncoupled)));
  }
  return trimer;
}

std::size_t select_level(const UncoupledSpectrum& uncoupled, int trimer, double eps0) {
  const auto idx = uncoupled.levels_in_block(trimer);
  if (idx.empty()) {
    throw Error(fmt::format("no uncoupled levels with x = {}/{}; available: {}", trimer,
                            uncoupled.params.N, available_x(uncoupled)));
  }
  std::size_t best = idx.front();
  for (auto i : idx) {
    const double d = std::abs(uncoupled.levels[i].eps - eps0);
    const double dbest = std::abs(uncoupled.levels[best].eps - eps0);
    // levels within a block are ascending, so strict < keeps the lower one on ties
    if (d < dbest) best = i;
  }
  return best;
}

InitialState prepare_initial(const UncoupledSpectrum& uncoupled,
                             std::shared_ptr<const Spectrum> coupled, double x0, double eps0) {
  require(coupled != nullptr, "prepare_initial: coupled spectrum required");
  const int trimer = trimer_for(uncoupled, x0);
  InitialState init;
  init.level = select_level(uncoupled, trimer, eps0);
  init.sector_vector =
      uncoupled.sector_vector(init.level, static_cast<std::size_t>(coupled->vectors.rows()));
  const Eigen::VectorXd c = coupled->vectors.transpose() * init.sector_vector;
  init.state.coeffs = c.cast<std::complex<double>>();
  init.state.spectrum = std::move(coupled);
  init.state.time = 0.0;
  return init;
}

QuantumState evolve(const QuantumState& state, double t) {
  QuantumState out = state;
  const Eigen::VectorXd& e = state.spectrum->values;
  for (Eigen::Index m = 0; m < e.size(); ++m)
    out.coeffs(m) *= std::polar(1.0, -e(m) * t);
  out.time = state.time + t;
  return out;
}

namespace {

std::vector<int> trimer_counts(const SectorBasis& sector) {
  std::vector<int> k(sector.size());
  for (std::size_t i = 0; i < sector.size(); ++i) k[i] = sector.trimer_count(i);
  return k;
}

}  // namespace

MonomerDensity population_distribution(const QuantumState& state, const SectorBasis& sector) {
  require(static_cast<std::size_t>(state.coeffs.size()) == sector.size(),
          "population_distribution: state and sector dimensions differ");
  const Eigen::VectorXcd psi = state.sector_amplitudes();
  MonomerDensity d = MonomerDensity::zeros(sector.total());
  for (std::size_t i = 0; i < sector.size(); ++i)
    d.p(sector.trimer_count(i)) += std::norm(psi(static_cast<Eigen::Index>(i)));
  d.t_lo = d.t_hi = state.time;
  return d;
}

std::vector<MonomerDensity> population_series(const QuantumState& state, const SectorBasis& sector,
                                              const std::vector<double>& times) {
  require(static_cast<std::size_t>(state.coeffs.size()) == sector.size(),
          "population_series: state and sector dimensions differ");
  const Eigen::MatrixXd& v = state.spectrum->vectors;
  const Eigen::VectorXd& e = state.spectrum->values;
  const auto dim = v.rows();
  const std::vector<int> k = trimer_counts(sector);
  constexpr Eigen::Index kChunk = 64;

  std::vector<MonomerDensity> out;
  out.reserve(times.size());
  for (std::size_t start = 0; start < times.size(); start += kChunk) {
    const auto cols = static_cast<Eigen::Index>(std::min<std::size_t>(kChunk, times.size() - start));
    Eigen::MatrixXd cr(dim, cols), ci(dim, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double t = times[start + static_cast<std::size_t>(j)];
      for (Eigen::Index m = 0; m < dim; ++m) {
        const std::complex<double> c = state.coeffs(m) * std::polar(1.0, -e(m) * t);
        cr(m, j) = c.real();
        ci(m, j) = c.imag();
      }
    }
    const Eigen::MatrixXd pr = v * cr;
    const Eigen::MatrixXd pi = v * ci;
    for (Eigen::Index j = 0; j < cols; ++j) {
      MonomerDensity d = MonomerDensity::zeros(sector.total());
      for (Eigen::Index i = 0; i < dim; ++i)
        d.p(k[static_cast<std::size_t>(i)]) += pr(i, j) * pr(i, j) + pi(i, j) * pi(i, j);
      d.t_lo = d.t_hi = state.time + times[start + static_cast<std::size_t>(j)];
      out.push_back(std::move(d));
    }
  }
  return out;
}

double entropy(const MonomerDensity& density) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < density.p.size(); ++i) {
    const double p = density.p(i);
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

namespace {

std::vector<double> sample_times(double t_lo, double t_hi, int samples) {
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i)
    t[static_cast<std::size_t>(i)] = t_lo + (t_hi - t_lo) * i / (samples - 1);
  return t;
}

MonomerDensity mean_of(const std::vector<MonomerDensity>& series, std::size_t first, int total,
                       double t_lo, double t_hi) {
  MonomerDensity avg = MonomerDensity::zeros(total);
  for (std::size_t i = first; i < series.size(); ++i) avg.p += series[i].p;
  const auto n = static_cast<int>(series.size() - first);
  avg.p /= n;
  avg.t_lo = t_lo;
  avg.t_hi = t_hi;
  avg.samples = n;
  return avg;
}

}  // namespace

MonomerDensity time_average(const QuantumState& state, const SectorBasis& sector, double t_lo,
                            double t_hi, int samples) {
  require(t_lo >= 0.0 && t_hi > t_lo, "time_average: need t_hi > t_lo >= 0");
  require(samples >= 2, "time_average: need samples >= 2");
  const auto series = population_series(state, sector, sample_times(t_lo, t_hi, samples));
  return mean_of(series, 0, sector.total(), state.time + t_lo, state.time + t_hi);
}

ThermalReference thermal_reference(const UncoupledSpectrum& uncoupled, double E0, double DeltaE) {
  require(DeltaE > 0.0, "thermal_reference: DeltaE must be > 0");
  ThermalReference th;
  th.E0 = E0;
  th.DeltaE = DeltaE;
  th.density = MonomerDensity::zeros(uncoupled.params.N);
  double total = 0.0;
  for (const auto& l : uncoupled.levels) {
    const double z = (l.energy - E0) / DeltaE;
    const double w = std::exp(-0.5 * z * z);
    th.density.p(l.x.trimer) += w;
    total += w;
  }
  if (total < 1e-12) {
    throw Error(fmt::format("thermal_reference: window E0 = {}, DeltaE = {} misses the spectrum "
                            "(total weight {:.3e})",
                            E0, DeltaE, total));
  }
  th.density.p /= total;
  return th;
}

double delta_rho(const MonomerDensity& average, const MonomerDensity& thermal) {
  require(average.N == thermal.N && average.p.size() == thermal.p.size(),
          "delta_rho: densities live on different x grids");
  return (average.p - thermal.p).norm();
}

EnergyMoments energy_moments(const HamiltonianMatrix& h, const Eigen::VectorXd& v) {
  require(v.size() == h.dimension(), "energy_moments: dimension mismatch");
  const Eigen::VectorXd hv = h.matrix * v;
  EnergyMoments m;
  m.mean = v.dot(hv);
  m.width = std::sqrt(std::max(0.0, hv.squaredNorm() - m.mean * m.mean));
  return m;
}

EnergyMoments energy_moments(const QuantumState& state) {
  const Eigen::VectorXd& e = state.spectrum->values;
  const Eigen::VectorXd w = state.coeffs.cwiseAbs2();
  EnergyMoments m;
  m.mean = w.dot(e);
  const double second = w.dot(e.cwiseProduct(e));
  m.width = std::sqrt(std::max(0.0, second - m.mean * m.mean));
  return m;
}

QuenchResult run_quench(const SectorBasis& sector, const UncoupledSpectrum& uncoupled,
                        const HamiltonianMatrix& h, std::shared_ptr<const Spectrum> coupled,
                        double x0, double eps0, const AveragingOptions& options) {
  require(options.horizon > 0.0 && options.window_start >= 0.0 && options.window_start < 1.0,
          "run_quench: invalid averaging window");
  require(options.samples >= 4, "run_quench: need at least 4 samples");

  const InitialState init = prepare_initial(uncoupled, std::move(coupled), x0, eps0);
  QuenchResult r;
  r.level = init.level;
  r.initial = uncoupled.levels[init.level];
  r.energy = energy_moments(h, init.sector_vector);

  const double t_lo = options.window_start * options.horizon;
  const auto series =
      population_series(init.state, sector, sample_times(t_lo, options.horizon, options.samples));
  r.average = mean_of(series, 0, sector.total(), t_lo, options.horizon);
  const MonomerDensity late_half =
      mean_of(series, series.size() / 2, sector.total(), series[series.size() / 2].t_lo,
              options.horizon);

  // omega = 0 leaves the initial state stationary; use the delta-window limit
  const double width =
      r.energy.width > 0.0 ? r.energy.width : 1e-12 * std::max(1.0, std::abs(r.energy.mean));
  r.thermal = thermal_reference(uncoupled, r.energy.mean, width);
  r.thermal.DeltaE = r.energy.width;

  r.delta_rho = delta_rho(r.average, r.thermal.density);
  r.delta_rho_error = std::abs(delta_rho(late_half, r.thermal.density) - r.delta_rho);
  r.entropy_average = entropy(r.average);
  r.entropy_thermal = entropy(r.thermal.density);
  double s = 0.0;
  for (const auto& d : series) s += entropy(d);
  r.entropy_late = s / static_cast<double>(series.size());
  return r;
}

}  // namespace bhtherm
