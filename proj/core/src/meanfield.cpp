// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "bhtherm/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

namespace bhtherm {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Bond {
  int i, j;
  double J;  // term -J sqrt(n_i n_j) cos(phi_j - phi_i)
};

std::array<Bond, 6> bonds(const ModelParams& p) {
  return {{{1, 2, p.Omega},
           {2, 3, p.Omega},
           {1, 3, p.Omega},
           {0, 1, p.omega},
           {0, 2, p.omega},
           {0, 3, p.omega}}};
}

double wrap_phase(double phi) {
  phi = std::fmod(phi, kTwoPi);
  return phi < 0.0 ? phi + kTwoPi : phi;
}

// Uniform double in [0, 1) from the top 53 bits.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

double hmf_energy(const ClassicalState& s, const ModelParams& params) {
  for (double n : s.n) require(n >= 0.0, "hmf_energy: negative occupation");
  double h = 1.5 * params.U;
  for (double n : s.n) h += 0.5 * params.U * (n * n - 2.0 * n);
  for (const Bond& b : bonds(params))
    h -= b.J * std::sqrt(s.n[b.i] * s.n[b.j]) * std::cos(s.phi[b.j] - s.phi[b.i]);
  return h;
}

PhaseSpaceVelocity equations_of_motion(const ClassicalState& s, const ModelParams& params) {
  for (double n : s.n) {
    require(n > 0.0,
            "equations_of_motion: (n, phi) velocities need every n_i > 0; integrate in "
            "Cartesian variables instead");
  }
  PhaseSpaceVelocity v;
  for (int i = 0; i < kModes; ++i) v.phidot[i] = params.U * (s.n[i] - 1.0);
  for (const Bond& b : bonds(params)) {
    const double root = std::sqrt(s.n[b.i] * s.n[b.j]);
    const double d = s.phi[b.j] - s.phi[b.i];
    const double sn = std::sin(d), cs = std::cos(d);
    // -dH/dphi_i and -dH/dphi_j
    v.ndot[b.i] += b.J * root * sn;
    v.ndot[b.j] -= b.J * root * sn;
    // dH/dn
    v.phidot[b.i] -= 0.5 * b.J * std::sqrt(s.n[b.j] / s.n[b.i]) * cs;
    v.phidot[b.j] -= 0.5 * b.J * std::sqrt(s.n[b.i] / s.n[b.j]) * cs;
  }
  return v;
}

CartesianState to_cartesian(const ClassicalState& s) {
  CartesianState z{};
  for (int i = 0; i < kModes; ++i) {
    require(s.n[i] >= 0.0, "to_cartesian: negative occupation");
    const double r = std::sqrt(2.0 * s.n[i]);
    z[i] = r * std::cos(s.phi[i]);
    z[kModes + i] = r * std::sin(s.phi[i]);
  }
  return z;
}

ClassicalState from_cartesian(const CartesianState& z, double t) {
  ClassicalState s;
  for (int i = 0; i < kModes; ++i) {
    const double q = z[i], p = z[kModes + i];
    s.n[i] = 0.5 * (q * q + p * p);
    s.phi[i] = wrap_phase(std::atan2(p, q));
  }
  s.t = t;
  return s;
}

void cartesian_rhs(const CartesianState& z, CartesianState& dz, const ModelParams& params) {
  // a = (q + i p)/sqrt(2), da/dt = i dH/da*, dH/da_i* = U (n_i - 1) a_i - (1/2) sum_j J_ij a_j
  std::array<double, kModes> fq{}, fp{};
  for (int i = 0; i < kModes; ++i) {
    const double q = z[i], p = z[kModes + i];
    const double w = params.U * (0.5 * (q * q + p * p) - 1.0);
    fq[i] = w * q;
    fp[i] = w * p;
  }
  for (const Bond& b : bonds(params)) {
    const double h = 0.5 * b.J;
    fq[b.i] -= h * z[b.j];
    fp[b.i] -= h * z[kModes + b.j];
    fq[b.j] -= h * z[b.i];
    fp[b.j] -= h * z[kModes + b.i];
  }
  for (int i = 0; i < kModes; ++i) {
    dz[i] = -fp[i];
    dz[kModes + i] = fq[i];
  }
}

double cartesian_energy(const CartesianState& z, const ModelParams& params) {
  double h = 1.5 * params.U;
  for (int i = 0; i < kModes; ++i) {
    const double n = 0.5 * (z[i] * z[i] + z[kModes + i] * z[kModes + i]);
    h += 0.5 * params.U * (n * n - 2.0 * n);
  }
  for (const Bond& b : bonds(params))
    h -= 0.5 * b.J * (z[b.i] * z[b.j] + z[kModes + b.i] * z[kModes + b.j]);
  return h;
}

namespace {

double cartesian_norm(const CartesianState& z) {
  double s = 0.0;
  for (double v : z) s += 0.5 * v * v;
  return s;
}

using Stepper = odeint::runge_kutta_fehlberg78<CartesianState>;

// Adaptive stepping loop shared by trajectory sampling and section finding.
// `on_step(prev, t_prev, next, t_next)` is called after each accepted step.
template <typename OnStep>
void drive(CartesianState& z, double& t, double t_stop, const ModelParams& params,
           const IntegratorOptions& options, double& dt, double e0, double n0, Trajectory& stats,
           OnStep&& on_step) {
  auto system = [&params](const CartesianState& x, CartesianState& dx, double) {
    cartesian_rhs(x, dx, params);
  };
  auto controlled = odeint::make_controlled(options.abs_tol, options.rel_tol, Stepper());
  const double escale = std::max(std::abs(e0), 1e-300);
  while (t < t_stop) {
    double step = std::min(dt, t_stop - t);
    const bool clipped = step < dt;
    const CartesianState prev = z;
    const double t_prev = t;
    if (controlled.try_step(system, z, t, step) == odeint::fail) {
      dt = step;
      if (dt < options.min_step) {
        throw IntegrationError(fmt::format(
            "step size {:.3e} fell below {:.3e} at t = {:.6g}", dt, options.min_step, t));
      }
      continue;
    }
    // keep the controller's proposal unless this step was shortened to hit t_stop
    if (!clipped) dt = step;
    ++stats.steps;
    const double ed = std::abs(cartesian_energy(z, params) - e0) / escale;
    const double nd = std::abs(cartesian_norm(z) - n0);
    stats.max_energy_drift = std::max(stats.max_energy_drift, ed);
    stats.max_norm_drift = std::max(stats.max_norm_drift, nd);
    if (ed > options.energy_tol || nd > options.norm_tol) {
      throw IntegrationError(fmt::format(
          "drift bound exceeded at t = {:.6g}: |dH|/|H| = {:.3e} (tol {:.1e}), |d sum n| = {:.3e} "
          "(tol {:.1e}); tighten abs_tol/rel_tol (now {:.1e}/{:.1e})",
          t, ed, options.energy_tol, nd, options.norm_tol, options.abs_tol, options.rel_tol));
    }
    on_step(prev, t_prev, z, t);
  }
}

}  // namespace

Trajectory integrate(const ClassicalState& s, const ModelParams& params,
                     const std::vector<double>& times, const IntegratorOptions& options) {
  require(std::is_sorted(times.begin(), times.end()), "integrate: times must be ascending");
  require(times.empty() || times.front() >= s.t, "integrate: times must not precede the state");
  CartesianState z = to_cartesian(s);
  double t = s.t;
  double dt = options.initial_step;
  const double e0 = cartesian_energy(z, params);
  const double n0 = cartesian_norm(z);
  Trajectory out;
  out.samples.reserve(times.size());
  for (double target : times) {
    drive(z, t, target, params, options, dt, e0, n0, out,
          [](const CartesianState&, double, const CartesianState&, double) {});
    out.samples.push_back(from_cartesian(z, target));
  }
  return out;
}

Trajectory integrate(const ClassicalState& s, const ModelParams& params, double t_end,
                     const IntegratorOptions& options) {
  require(t_end > s.t, "integrate: t_end must be after the initial time");
  return integrate(s, params, std::vector<double>{t_end}, options);
}

namespace {

struct ShellSolver {
  const ModelParams& params;
  double E;
  double tol;

  bool on_shell(const ClassicalState& s) const {
    return std::abs(hmf_energy(s, params) - E) <= tol * std::max(1.0, std::abs(E));
  }

  // H(phi2) = C + A cos(phi2) + B sin(phi2)
  void harmonic(ClassicalState s, double& c, double& a, double& b) const {
    s.phi[1] = 0.0;
    const double h0 = hmf_energy(s, params);
    s.phi[1] = std::numbers::pi;
    const double hpi = hmf_energy(s, params);
    s.phi[1] = 0.5 * std::numbers::pi;
    const double hhalf = hmf_energy(s, params);
    c = 0.5 * (h0 + hpi);
    a = 0.5 * (h0 - hpi);
    b = hhalf - c;
  }

  bool solve_phase(ClassicalState& s, std::mt19937_64& rng) const {
    double c, a, b;
    harmonic(s, c, a, b);
    const double r = std::hypot(a, b);
    if (r == 0.0 || std::abs(E - c) > r) return false;
    const double theta = std::atan2(b, a);
    const double delta = std::acos(std::clamp((E - c) / r, -1.0, 1.0));
    s.phi[1] = wrap_phase(theta + ((rng() & 1u) ? delta : -delta));
    return on_shell(s);
  }

  bool solve_split(ClassicalState& s, std::mt19937_64& rng) const {
    const double pair = s.n[1] + s.n[2];
    auto f = [&](double n2) {
      ClassicalState t = s;
      t.n[1] = n2;
      t.n[2] = pair - n2;
      return hmf_energy(t, params) - E;
    };
    constexpr int kGrid = 64;
    std::vector<std::pair<double, double>> brackets;
    double prev_x = 0.0, prev_f = f(0.0);
    for (int k = 1; k <= kGrid; ++k) {
      const double x = pair * k / kGrid;
      const double fx = f(x);
      if ((prev_f <= 0.0) != (fx <= 0.0)) brackets.emplace_back(prev_x, x);
      prev_x = x;
      prev_f = fx;
    }
    if (brackets.empty()) return false;
    auto [lo, hi] = brackets[rng() % brackets.size()];
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * pair; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if ((fm <= 0.0) == (flo <= 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    s.n[1] = 0.5 * (lo + hi);
    s.n[2] = pair - s.n[1];
    return on_shell(s);
  }
};

ClassicalState draw_slice_point(double n1, double trimer, std::mt19937_64& rng) {
  ClassicalState s;
  std::array<double, 3> e{};
  double sum = 0.0;
  for (double& v : e) {
    v = -std::log1p(-uniform01(rng));  // Exp(1); normalized -> uniform on the simplex
    sum += v;
  }
  s.n[0] = n1;
  for (int i = 0; i < 3; ++i) s.n[1 + i] = trimer * e[i] / sum;
  for (double& phi : s.phi) phi = kTwoPi * uniform01(rng);
  return s;
}

}  // namespace

Ensemble sample_microcanonical(const ModelParams& params, double x_target, double E_target,
                               std::size_t count, std::uint64_t seed,
                               const SamplingOptions& options) {
  params.validate();
  require(x_target > 0.0 && x_target <= 1.0, "sample_microcanonical: x_target must be in (0, 1]");
  const double ncl = classical_total(params.N);
  const double n1 = (1.0 - x_target) * ncl;
  const double trimer = x_target * ncl;
  const ShellSolver solver{params, E_target, options.energy_rel_tol};

  // reachability: the phi2 family of each probe spans [C - R, C + R]
  {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 0; k < options.reachability_probes; ++k) {
      double c, a, b;
      solver.harmonic(draw_slice_point(n1, trimer, rng), c, a, b);
      const double r = std::hypot(a, b);
      lo = std::min(lo, c - r);
      hi = std::max(hi, c + r);
    }
    if (E_target < lo || E_target > hi) {
      throw Error(fmt::format("sample_microcanonical: E = {} outside the scanned range [{}, {}] of "
                              "the x = {} slice",
                              E_target, lo, hi, x_target));
    }
  }

  Ensemble ens;
  ens.seed = seed;
  ens.x_target = x_target;
  ens.E_target = E_target;
  ens.energy_rel_tol = options.energy_rel_tol;
  ens.members.resize(count);
  std::vector<int> attempts(count, 0), method(count, 0);
  std::vector<char> ok(count, 0);

#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
    const auto m = static_cast<std::size_t>(i);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(m >> 32)};
    std::mt19937_64 rng(seq);
    for (int a = 0; a < options.max_attempts_per_member; ++a) {
      ++attempts[m];
      ClassicalState s = draw_slice_point(n1, trimer, rng);
      if (solver.solve_phase(s, rng)) {
        method[m] = 1;
      } else if (solver.solve_split(s, rng)) {
        method[m] = 2;
      } else {
        continue;
      }
      ens.members[m] = s;
      ok[m] = 1;
      break;
    }
  }

  std::size_t failed = 0;
  for (std::size_t m = 0; m < count; ++m) {
    ens.attempts += static_cast<std::size_t>(attempts[m]);
    if (!ok[m]) ++failed;
    if (method[m] == 1) ++ens.phase_solutions;
    if (method[m] == 2) ++ens.split_solutions;
  }
  const double rate = ens.attempts ? static_cast<double>(count - failed) / ens.attempts : 0.0;
  if (failed > 0 || rate < options.min_acceptance) {
    throw Error(fmt::format("sample_microcanonical: acceptance rate {:.2e} ({} of {} members "
                            "unplaced); the (x = {}, E = {}) shell is likely unreachable",
                            rate, failed, count, x_target, E_target));
  }
  return ens;
}

MonomerDensity classical_distribution(const std::vector<ClassicalState>& states, int N) {
  require(N > 0, "classical_distribution: N must be positive");
  require(!states.empty(), "classical_distribution: no states");
  MonomerDensity d = MonomerDensity::zeros(N);
  for (const auto& s : states) {
    const double x = s.x();
    require(x >= -1e-9 && x <= 1.0 + 1e-9, fmt::format("classical_distribution: x = {} outside [0, 1]", x));
    d.p(std::clamp(static_cast<int>(std::lround(x * N)), 0, N)) += 1.0;
  }
  d.p /= static_cast<double>(states.size());
  d.t_lo = d.t_hi = states.front().t;
  return d;
}

EnsembleSeries evolve_ensemble(const Ensemble& ensemble, const ModelParams& params,
                               const std::vector<double>& times, double window_lo,
                               const IntegratorOptions& options) {
  require(!times.empty() && !ensemble.members.empty(), "evolve_ensemble: empty input");
  const int N = params.N;
  const auto members = ensemble.members.size();
  const auto nt = times.size();
  std::vector<int> bins(members * nt, 0);
  std::vector<double> edrift(members, 0.0), ndrift(members, 0.0);
  std::vector<std::string> errors(members);

#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(members); ++i) {
    const auto m = static_cast<std::size_t>(i);
    try {
      const Trajectory tr = integrate(ensemble.members[m], params, times, options);
      for (std::size_t k = 0; k < nt; ++k)
        bins[m * nt + k] = std::clamp(static_cast<int>(std::lround(tr.samples[k].x() * N)), 0, N);
      edrift[m] = tr.max_energy_drift;
      ndrift[m] = tr.max_norm_drift;
    } catch (const std::exception& e) {
      errors[m] = e.what();
    }
  }
  for (std::size_t m = 0; m < members; ++m)
    if (!errors[m].empty()) throw IntegrationError(fmt::format("member {}: {}", m, errors[m]));

  EnsembleSeries out;
  out.times = times;
  out.max_energy_drift = *std::max_element(edrift.begin(), edrift.end());
  out.max_norm_drift = *std::max_element(ndrift.begin(), ndrift.end());
  out.densities.reserve(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    MonomerDensity d = MonomerDensity::zeros(N);
    for (std::size_t m = 0; m < members; ++m) d.p(bins[m * nt + k]) += 1.0;
    d.p /= static_cast<double>(members);
    d.t_lo = d.t_hi = times[k];
    out.densities.push_back(std::move(d));
  }

  std::size_t first = 0;
  while (first < nt && times[first] < window_lo) ++first;
  require(first < nt, "evolve_ensemble: averaging window contains no sample time");
  const auto window = static_cast<double>(nt - first);
  out.member_window = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(members), N + 1);
  for (std::size_t m = 0; m < members; ++m)
    for (std::size_t k = first; k < nt; ++k)
      out.member_window(static_cast<Eigen::Index>(m), bins[m * nt + k]) += 1.0 / window;
  out.window_average = MonomerDensity::zeros(N);
  out.window_average.p = out.member_window.colwise().mean().transpose();
  out.window_average.t_lo = times[first];
  out.window_average.t_hi = times.back();
  out.window_average.samples = static_cast<int>(window);
  return out;
}

BootstrapEstimate bootstrap_delta_rho(const EnsembleSeries& series, const MonomerDensity& thermal,
                                      int resamples, std::uint64_t seed) {
  require(resamples >= 2, "bootstrap_delta_rho: need at least two resamples");
  BootstrapEstimate est;
  est.value = delta_rho(series.window_average, thermal);
  const auto members = series.member_window.rows();
  std::mt19937_64 rng(seed);
  std::vector<double> values(static_cast<std::size_t>(resamples));
  for (auto& v : values) {
    MonomerDensity d = MonomerDensity::zeros(thermal.N);
    for (Eigen::Index k = 0; k < members; ++k)
      d.p += series.member_window.row(static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(members))).transpose();
    d.p /= static_cast<double>(members);
    v = delta_rho(d, thermal);
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= resamples;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  est.stderr_ = std::sqrt(var / (resamples - 1));
  return est;
}

Section poincare_section(const ModelParams& params, const std::vector<ClassicalState>& seeds,
                         const SectionSpec& spec, const IntegratorOptions& options) {
  const int ref = spec.reference_mode >= 0 ? spec.reference_mode : (params.omega > 0.0 ? 0 : 3);
  require(ref != 1 && ref < kModes, "poincare_section: reference mode must differ from site 2");
  Section out;
  out.reference_mode = ref;

  // g = Im(a2 conj(a_ref)) ~ sin(phi2 - phi_ref); c = Re(...) ~ cos(...)
  auto g = [ref](const CartesianState& z) { return z[kModes + 1] * z[ref] - z[1] * z[kModes + ref]; };
  auto c = [ref](const CartesianState& z) { return z[1] * z[ref] + z[kModes + 1] * z[kModes + ref]; };
  auto system = [&params](const CartesianState& x, CartesianState& dx, double) {
    cartesian_rhs(x, dx, params);
  };

  std::vector<std::vector<SectionPoint>> per_seed(seeds.size());
  std::vector<std::string> errors(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(seeds.size()); ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      CartesianState z = to_cartesian(seeds[k]);
      double t = seeds[k].t, dt = options.initial_step;
      const double e0 = cartesian_energy(z, params), n0 = cartesian_norm(z);
      Trajectory stats;
      Stepper rk;
      auto& pts = per_seed[k];
      drive(z, t, seeds[k].t + spec.t_end, params, options, dt, e0, n0, stats,
            [&](const CartesianState& prev, double tp, const CartesianState& next, double tn) {
              if (pts.size() >= spec.max_points) return;
              if (!(g(prev) < 0.0 && g(next) >= 0.0 && c(next) > 0.0)) return;
              double lo = 0.0, hi = tn - tp;
              CartesianState probe = next;
              for (int it = 0; it < 60 && hi - lo > 1e-14; ++it) {
                const double mid = 0.5 * (lo + hi);
                rk.do_step(system, prev, tp, probe, mid);
                (g(probe) < 0.0 ? lo : hi) = mid;
              }
              rk.do_step(system, prev, tp, probe, hi);
              const ClassicalState s = from_cartesian(probe, tp + hi);
              SectionPoint p;
              p.u = (s.n[2] - s.n[3]) / (s.n[1] + s.n[2] + s.n[3]);
              const double d = std::remainder(s.phi[2] - s.phi[3], kTwoPi);
              p.v = d <= -std::numbers::pi ? d + kTwoPi : d;
              p.t = tp + hi;
              p.seed = k;
              pts.push_back(p);
            });
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    if (!errors[k].empty()) throw IntegrationError(fmt::format("seed {}: {}", k, errors[k]));
    if (per_seed[k].empty())
      out.diagnostic += fmt::format("seed {}: no crossings within t = {}\n", k, spec.t_end);
    for (const auto& p : per_seed[k]) {
      if (out.points.size() >= spec.max_points) break;
      out.points.push_back(p);
    }
  }
  return out;
}

}  // namespace bhtherm
