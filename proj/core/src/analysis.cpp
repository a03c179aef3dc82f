// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "bhtherm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace bhtherm {

std::shared_ptr<const SectorBasis> SpectrumCache::sector(int N) {
  std::lock_guard lock(mutex_);
  auto& slot = sectors_[N];
  if (!slot) slot = std::make_shared<const SectorBasis>(N);
  return slot;
}

std::shared_ptr<const UncoupledSpectrum> SpectrumCache::uncoupled(int N, double UN) {
  const auto basis = sector(N);
  std::lock_guard lock(mutex_);
  auto& slot = uncoupled_[{N, UN}];
  if (!slot) {
    slot = std::make_shared<const UncoupledSpectrum>(
        diagonalize_uncoupled(ModelParams::from_interaction(UN, N, 0.0), *basis));
  }
  return slot;
}

std::shared_ptr<const Spectrum> SpectrumCache::coupled(int N, double UN, double omega) {
  const auto basis = sector(N);
  const Key key{N, UN, omega};
  std::lock_guard lock(mutex_);
  if (auto it = coupled_.find(key); it != coupled_.end()) return it->second;
  auto spectrum = std::make_shared<const Spectrum>(
      diagonalize(build_hamiltonian(ModelParams::from_interaction(UN, N, omega), *basis)));
  ++diagonalizations_;
  if (capacity_ > 0) {
    while (order_.size() >= capacity_) {
      coupled_.erase(order_.front());
      order_.erase(order_.begin());
    }
    coupled_[key] = spectrum;
    order_.push_back(key);
  }
  return spectrum;
}

QuenchResult quantum_quench(SpectrumCache& cache, const QuenchQuery& q, double omega,
                            const AveragingOptions& averaging) {
  const auto basis = cache.sector(q.N);
  const auto uncoupled = cache.uncoupled(q.N, q.UN);
  const auto h = build_hamiltonian(ModelParams::from_interaction(q.UN, q.N, omega), *basis);
  return run_quench(*basis, *uncoupled, h, cache.coupled(q.N, q.UN, omega), q.x0, q.eps0, averaging);
}

std::vector<double> classical_times(const AveragingOptions& averaging) {
  require(averaging.horizon > 0.0 && averaging.window_start >= 0.0 && averaging.window_start < 1.0 &&
              averaging.samples >= 2,
          "classical_times: invalid averaging window");
  const double t_lo = averaging.window_start * averaging.horizon;
  const double dt = (averaging.horizon - t_lo) / (averaging.samples - 1);
  const auto before = static_cast<int>(std::ceil(t_lo / dt - 1e-9));
  std::vector<double> times;
  for (int k = 0; k < before; ++k) times.push_back(k * dt);
  for (int k = 0; k < averaging.samples; ++k) times.push_back(t_lo + k * dt);
  times.back() = averaging.horizon;
  return times;
}

ClassicalQuench classical_quench(SpectrumCache& cache, const QuenchQuery& q, double omega,
                                 const ClassicalRunOptions& options) {
  const auto basis = cache.sector(q.N);
  const auto uncoupled = cache.uncoupled(q.N, q.UN);
  const ModelParams params = ModelParams::from_interaction(q.UN, q.N, omega);
  const std::size_t level = select_level(*uncoupled, trimer_for(*uncoupled, q.x0), q.eps0);

  ClassicalQuench r;
  r.initial = uncoupled->levels[level];
  const auto h = build_hamiltonian(params, *basis);
  const EnergyMoments moments = energy_moments(h, uncoupled->sector_vector(level, basis->size()));
  r.E_target = moments.mean;
  const double width = moments.width > 0.0 ? moments.width : 1e-12 * std::max(1.0, std::abs(moments.mean));
  r.thermal = thermal_reference(*uncoupled, moments.mean, width);
  r.thermal.DeltaE = moments.width;

  r.ensemble = sample_microcanonical(params, r.initial.x.value(), r.E_target, options.members,
                                     options.seed, options.sampling);
  const auto times = classical_times(options.averaging);
  r.series = evolve_ensemble(r.ensemble, params, times,
                             options.averaging.window_start * options.averaging.horizon,
                             options.integrator);
  r.delta_rho = bootstrap_delta_rho(r.series, r.thermal.density, options.bootstrap_resamples,
                                    options.seed + 0x5bd1e995ULL);
  r.entropy_average = entropy(r.series.window_average);
  r.entropy_thermal = entropy(r.thermal.density);
  double s = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < r.series.window_average.t_lo) continue;
    s += entropy(r.series.densities[k]);
    ++n;
  }
  r.entropy_late = s / n;
  return r;
}

const char* to_string(Side side) { return side == Side::quantum ? "quantum" : "classical"; }

const char* to_string(ThresholdStatus status) {
  switch (status) {
    case ThresholdStatus::crossing:
      return "crossing";
    case ThresholdStatus::upper_bound:
      return "upper_bound";
    case ThresholdStatus::above_grid:
      return "above_grid";
  }
  return "?";
}

DeltaRhoEvaluator quantum_evaluator(SpectrumCache& cache, const QuenchQuery& q,
                                    const AveragingOptions& averaging) {
  return [&cache, q, averaging](double omega) {
    const QuenchResult r = quantum_quench(cache, q, omega, averaging);
    return SweepPoint{omega, r.delta_rho, r.delta_rho_error};
  };
}

DeltaRhoEvaluator classical_evaluator(SpectrumCache& cache, const QuenchQuery& q,
                                      const ClassicalRunOptions& options) {
  return [&cache, q, options](double omega) {
    const ClassicalQuench r = classical_quench(cache, q, omega, options);
    return SweepPoint{omega, r.delta_rho.value, r.delta_rho.stderr_};
  };
}

ThresholdResult find_threshold(const DeltaRhoEvaluator& evaluate, const ThresholdOptions& options) {
  require(!options.grid.empty(), "find_threshold: empty grid");
  require(std::is_sorted(options.grid.begin(), options.grid.end()) && options.grid.front() > 0.0,
          "find_threshold: grid must be positive and ascending");
  require(options.max_bisections >= 0, "find_threshold: negative bisection count");

  ThresholdResult r;
  r.c = options.c;
  std::size_t below = options.grid.size();
  for (std::size_t i = 0; i < options.grid.size(); ++i) {
    r.sweep.push_back(evaluate(options.grid[i]));
    if (r.sweep.back().delta_rho < options.c) {
      below = i;
      break;
    }
  }
  if (below == 0) {
    r.status = ThresholdStatus::upper_bound;
    r.method = "bound";
    r.omega_T = r.bracket_lo = r.bracket_hi = options.grid.front();
    return r;
  }
  if (below == options.grid.size()) {
    r.status = ThresholdStatus::above_grid;
    r.method = "bound";
    r.omega_T = r.bracket_lo = r.bracket_hi = options.grid.back();
    return r;
  }

  double lo = options.grid[below - 1], hi = options.grid[below];
  for (int k = 0; k < options.max_bisections; ++k) {
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    r.sweep.push_back(evaluate(mid));
    (r.sweep.back().delta_rho < options.c ? hi : lo) = mid;
  }
  std::sort(r.sweep.begin(), r.sweep.end(),
            [](const SweepPoint& a, const SweepPoint& b) { return a.omega < b.omega; });

  std::vector<double> xs, ys;
  for (const auto& p : r.sweep) {
    xs.push_back(p.omega);
    ys.push_back(p.delta_rho);
  }
  const auto it = std::find(xs.begin(), xs.end(), lo);
  const auto i = static_cast<std::size_t>(it - xs.begin());
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  r.status = ThresholdStatus::crossing;
  r.method = "interpolation";
  const auto root = monotone_crossing(xs, ys, i, options.c);
  r.omega_T = root ? std::clamp(*root, lo, hi) : hi;
  return r;
}

namespace {

template <typename MakeQuery>
std::vector<ScanRow> scan(SpectrumCache& cache, const std::vector<double>& values,
                          const ScanOptions& options, MakeQuery&& make) {
  std::vector<ScanRow> rows;
  for (double v : values) {
    ScanRow row;
    row.parameter = v;
    const QuenchQuery q = make(v);
    if (options.run_quantum) {
      try {
        row.quantum = find_threshold(quantum_evaluator(cache, q, options.averaging), options.threshold);
      } catch (const std::exception& e) {
        row.error += fmt::format("quantum: {}; ", e.what());
      }
    }
    if (options.run_classical) {
      try {
        row.classical =
            find_threshold(classical_evaluator(cache, q, options.classical), options.threshold);
      } catch (const std::exception& e) {
        row.error += fmt::format("classical: {}; ", e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<ScanRow> scan_epsilon(SpectrumCache& cache, const QuenchQuery& base,
                                  const std::vector<double>& eps_values, const ScanOptions& options) {
  return scan(cache, eps_values, options, [&](double eps) {
    QuenchQuery q = base;
    q.eps0 = eps;
    return q;
  });
}

std::vector<ScanRow> scan_interaction(SpectrumCache& cache, const QuenchQuery& base,
                                      const std::vector<double>& un_values,
                                      const ScanOptions& options) {
  return scan(cache, un_values, options, [&](double un) {
    QuenchQuery q = base;
    q.UN = un;
    return q;
  });
}

double collapse_metric(const std::vector<ScalingCurve>& curves) {
  double worst = 0.0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = i + 1; j < curves.size(); ++j) {
      const auto& a = curves[i].points;
      const auto& b = curves[j].points;
      require(a.size() == b.size() && !a.empty(), "collapse_metric: curves must share the grid");
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) s += std::pow(a[k].delta_rho - b[k].delta_rho, 2);
      worst = std::max(worst, std::sqrt(s / static_cast<double>(a.size())));
    }
  }
  return worst;
}

ScalingStudy scaling_study(SpectrumCache& cache, const QuenchQuery& base, const std::vector<int>& Ns,
                           const ScalingOptions& options) {
  require(Ns.size() >= 4, "scaling_study: need at least four values of N to test the collapse");
  require(options.omega_n_grid.size() >= 2 &&
              std::is_sorted(options.omega_n_grid.begin(), options.omega_n_grid.end()),
          "scaling_study: omega N grid must be ascending with at least two points");
  ScalingStudy st;
  std::vector<double> all_s, all_d;
  for (int N : Ns) {
    ScalingCurve curve;
    curve.N = N;
    QuenchQuery q = base;
    q.N = N;
    for (double s : options.omega_n_grid) {
      const QuenchResult r = quantum_quench(cache, q, s / N, options.averaging);
      curve.points.push_back({s / N, r.delta_rho, r.delta_rho_error});
      all_s.push_back(s);
      all_d.push_back(r.delta_rho);
    }
    std::vector<double> ds;
    for (const auto& p : curve.points) ds.push_back(p.delta_rho);
    for (std::size_t k = 0; k + 1 < ds.size(); ++k) {
      if (ds[k] >= options.c && ds[k + 1] < options.c) {
        curve.omega_T_N = monotone_crossing(options.omega_n_grid, ds, k, options.c);
        break;
      }
    }
    st.curves.push_back(std::move(curve));
  }
  st.collapse_metric = collapse_metric(st.curves);
  st.fit = fit_inverse_shift(all_s, all_d);
  st.omega_T_N_fit = st.fit.a / options.c - st.fit.b;

  std::vector<double> crossings;
  for (const auto& c : st.curves)
    if (c.omega_T_N) crossings.push_back(*c.omega_T_N);
  if (crossings.size() >= 2) {
    const auto [mn, mx] = std::minmax_element(crossings.begin(), crossings.end());
    double mean = 0.0;
    for (double v : crossings) mean += v;
    mean /= static_cast<double>(crossings.size());
    st.omega_T_N_spread = (*mx - *mn) / mean;
  } else {
    st.omega_T_N_spread = std::numeric_limits<double>::quiet_NaN();
  }
  return st;
}

SpacingStudy spacing_scaling(SpectrumCache& cache, double UN, double x0, const std::vector<int>& Ns,
                             const SpacingWindow& local) {
  require(Ns.size() >= 4, "spacing_scaling: need at least four values of N");
  require(local.local && local.eps_lo < local.eps_hi, "spacing_scaling: invalid local window");
  SpacingStudy st;
  st.x0 = x0;
  st.local = local;
  std::vector<double> ns, globals, locals;
  for (int N : Ns) {
    const auto unc = cache.uncoupled(N, UN);
    const auto idx = unc->levels_in_block(trimer_for(*unc, x0));
    std::vector<double> e, e_local;
    for (std::size_t i : idx) {
      e.push_back(unc->levels[i].energy);
      if (unc->levels[i].eps >= local.eps_lo && unc->levels[i].eps <= local.eps_hi)
        e_local.push_back(unc->levels[i].energy);
    }
    std::sort(e.begin(), e.end());
    std::sort(e_local.begin(), e_local.end());
    if (e_local.size() < 2) {
      throw Error(fmt::format("spacing_scaling: fewer than two levels of the x = {} block at N = {} "
                              "lie in {} <= eps <= {}",
                              x0, N, local.eps_lo, local.eps_hi));
    }
    SpacingRow row;
    row.N = N;
    row.levels = e.size();
    row.global = mean_level_spacing(e, SpacingWindow::global());
    row.local = (e_local.back() - e_local.front()) / static_cast<double>(e_local.size() - 1);
    st.rows.push_back(row);
    ns.push_back(N);
    globals.push_back(row.global);
    locals.push_back(row.local);
  }
  st.global_fit = fit_inverse_quadratic(ns, globals);
  st.local_fit = fit_inverse_quadratic(ns, locals);
  return st;
}

}  // namespace bhtherm
