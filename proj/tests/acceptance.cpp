// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// `--criterion k` runs a single one. The exit status is nonzero if any
// selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bhtherm/analysis.hpp"
#include "bhtherm/linalg.hpp"
#include "bhtherm/meanfield.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"
#include "support/random_matrix.hpp"

using namespace bhtherm;

namespace {

// Pinned tolerances.
constexpr double kEigenTol = 1e-10;
constexpr double kCommutatorTol = 1e-12;
constexpr double kPropagatorTol = 1e-6;
constexpr double kGoeR = 0.53, kPoissonR = 0.386, kRTol = 0.01, kKsTol = 0.05;
constexpr double kChaoticR = 0.50, kRegularR = 0.45;
constexpr double kC = 0.1;
constexpr double kEntropyRel = 0.10;
constexpr double kEnergyDrift = 1e-8, kNormDrift = 1e-10, kGradientTol = 1e-7;
constexpr double kCollapseTol = 0.1, kFitRmsTol = 0.05, kSpreadTol = 0.30;
constexpr double kSpacingRel = 0.10;
constexpr double kSyntheticTol = 1e-6;

// Shared desk-scale quench parameters.
constexpr int kN = 40;
constexpr double kUN = 10.0;
constexpr double kX0 = 0.6;

struct Outcome {
  bool pass = false;
  std::string detail;
};

SpectrumCache& cache() {
  static SpectrumCache c(2);
  return c;
}

Outcome combinatorics() {
  std::string detail;
  bool ok = true;
  for (int n = 2; n <= 10; ++n) {
    const auto f = oracle::fock_states(n);
    const auto rank = oracle::range_basis(oracle::antisymmetric_projector(f)).cols();
    const auto dim = static_cast<Eigen::Index>(SectorBasis(n).size());
    ok = ok && rank == dim;
    detail += fmt::format("N={}:{}/{} ", n, dim, rank);
  }
  const auto p = ModelParams::from_interaction(kUN, 3, 0.1);
  const Spectrum s = diagonalize(build_hamiltonian(p, SectorBasis(3)));
  const double err = std::abs(s.values(0) - (1.5 * p.Omega + p.U));
  ok = ok && s.size() == 1 && err < kEigenTol;
  return {ok, detail + fmt::format("| N=3 level error {:.2e}", err)};
}

Outcome symmetry() {
  double worst = 0.0, projection = 0.0;
  for (int n = 1; n <= 8; ++n) {
    const FullBasis full(4, n);
    const SectorBasis sector(n);
    const Eigen::MatrixXd R = testing_support::rotation_matrix(full);
    const Eigen::MatrixXd S = testing_support::isometry(full, sector);
    for (double w : {0.0, 0.1, 0.4}) {
      const auto p = ModelParams::from_interaction(kUN, n, w);
      const Eigen::MatrixXd H = oracle::full_hamiltonian(oracle::from_basis(full), p);
      worst = std::max(worst, (H * R - R * H).cwiseAbs().maxCoeff());
      if (S.cols() > 0) {
        const Eigen::MatrixXd h = testing_support::dense(build_hamiltonian(p, sector));
        projection = std::max(projection, (S.transpose() * H * S - h).cwiseAbs().maxCoeff());
      }
    }
  }
  return {worst < kCommutatorTol && projection < kCommutatorTol,
          fmt::format("max |[H,R]| = {:.2e}, max |S^T H S - H_sector| = {:.2e}", worst, projection)};
}

Outcome propagator() {
  constexpr int n = 8;
  double worst = 0.0;
  for (double w : {0.1, 0.4}) {
    const SectorBasis sector(n);
    const auto uncoupled = diagonalize_uncoupled(ModelParams::from_interaction(kUN, n, 0.0), sector);
    const auto h = build_hamiltonian(ModelParams::from_interaction(kUN, n, w), sector);
    const auto spectrum = std::make_shared<const Spectrum>(diagonalize(h));
    const auto init = prepare_initial(uncoupled, spectrum, 0.5, 0.3);
    const Eigen::MatrixXd H(h.matrix);
    Eigen::VectorXcd psi = init.sector_vector.cast<std::complex<double>>();
    double t = 0.0;
    for (double checkpoint : {1.0, 10.0, 25.0, 50.0, 100.0}) {
      psi = oracle::rk4_schrodinger(H, psi, checkpoint - t, 1e-4);
      t = checkpoint;
      worst = std::max(worst, (evolve(init.state, t).sector_amplitudes() - psi).cwiseAbs().maxCoeff());
    }
  }
  return {worst < kPropagatorTol, fmt::format("max amplitude error {:.2e} up to t = 100", worst)};
}

Outcome random_matrix() {
  // pooled over independent draws; one draw alone fluctuates by ~0.005
  constexpr int kDraws = 8;
  std::vector<double> r_goe, s_goe;
  double lo = 1.0, hi = 0.0;
  for (int k = 0; k < kDraws; ++k) {
    const Eigen::VectorXd e = symmetric_eigenvalues(testing_support::goe(2000, 2026 + k));
    const std::vector<double> g(e.data(), e.data() + e.size());
    const auto r = spacing_ratio(g).r;
    const double m = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    lo = std::min(lo, m);
    hi = std::max(hi, m);
    r_goe.insert(r_goe.end(), r.begin(), r.end());
    const auto s = unfold_spectrum(g);
    s_goe.insert(s_goe.end(), s.begin(), s.end());
  }
  const double mean_goe = std::accumulate(r_goe.begin(), r_goe.end(), 0.0) / static_cast<double>(r_goe.size());
  const auto poisson = testing_support::poisson_levels(5000, 2026);
  const double r_poi = spacing_ratio(poisson).mean();
  const double ks_goe = testing_support::ks_distance(s_goe, testing_support::wigner_cdf);
  const double ks_poi = testing_support::ks_distance(unfold_spectrum(poisson), testing_support::poisson_cdf);
  const bool ok = std::abs(mean_goe - kGoeR) <= kRTol && std::abs(r_poi - kPoissonR) <= kRTol &&
                  ks_goe < kKsTol && ks_poi < kKsTol;
  return {ok, fmt::format("<r> GOE {:.4f} ({} draws, per draw {:.4f}..{:.4f}), Poisson {:.4f}; KS Wigner {:.4f}, "
                          "exponential {:.4f}",
                          mean_goe, kDraws, lo, hi, r_poi, ks_goe, ks_poi)};
}

Outcome chaos_structure() {
  const auto u = cache().uncoupled(kN, kUN);
  const ChaosGrid grid = rasterize(chaos_map(*u, 21), 20);
  const int row = grid.x_row(kX0);
  const int c3 = grid.eps_bin(0.3), c4 = grid.eps_bin(0.4);
  const double r3 = grid.values(row, c3), r4 = grid.values(row, c4);
  const auto chaotic = connected_region(grid, row, c3, kChaoticR);
  // r < 0.45 region: threshold the negated grid
  ChaosGrid negated = grid;
  negated.values = -grid.values;
  const auto regular = connected_region(negated, row, c4, -kRegularR);
  std::string coverage;
  for (int j = 0; j < grid.eps_bins; ++j)
    if (!std::isnan(grid.values(row, j))) coverage += fmt::format(" {}:{:.3f}", j, grid.values(row, j));
  const bool ok = !chaotic.empty() && !regular.empty();
  return {ok, fmt::format("x=0.6 row bins{}; r(0.3) = {:.3f} region {} cells; r(0.4) = {} region {} cells",
                          coverage, r3, chaotic.size(), std::isnan(r4) ? "no window" : fmt::format("{:.3f}", r4),
                          regular.size())};
}

double box_delta_rho(const QuenchResult& r, const UncoupledSpectrum& u) {
  // uniform window with the same variance as the Gaussian one
  const double half = std::sqrt(3.0) * r.thermal.DeltaE;
  auto box = MonomerDensity::zeros(u.params.N);
  for (const auto& l : u.levels)
    if (std::abs(l.energy - r.thermal.E0) <= half) box.p(l.x.trimer) += 1.0;
  if (box.p.sum() == 0.0) return std::nan("");
  box.p /= box.p.sum();
  return delta_rho(r.average, box);
}

Outcome dichotomy() {
  const QuenchQuery q{kN, kUN, kX0, 0.3};
  const auto strong = quantum_quench(cache(), q, 0.1);
  const auto weak = quantum_quench(cache(), q, 0.01);
  const double rel = (strong.entropy_thermal - strong.entropy_late) / strong.entropy_thermal;
  const bool ok = strong.delta_rho < kC && weak.delta_rho > kC && rel >= 0.0 && rel <= kEntropyRel;
  return {ok, fmt::format("eps0 = {:.4f}: drho(0.1) = {:.4f} (box window {:.4f}), drho(0.01) = {:.4f}; "
                          "S_late = {:.4f}, S_th = {:.4f}, deficit {:.2f}%",
                          strong.initial.eps, strong.delta_rho, box_delta_rho(strong, *cache().uncoupled(kN, kUN)),
                          weak.delta_rho, strong.entropy_late, strong.entropy_thermal, 100 * rel)};
}

Outcome rescue() {
  const QuenchQuery q{kN, kUN, kX0, 0.4};
  const auto w01 = quantum_quench(cache(), q, 0.1);
  const auto w04 = quantum_quench(cache(), q, 0.4);
  const bool ok = w04.delta_rho < w01.delta_rho && w04.delta_rho < kC;
  return {ok, fmt::format("eps0 = {:.4f}: drho(0.4) = {:.4f}, drho(0.1) = {:.4f}", w04.initial.eps, w04.delta_rho,
                          w01.delta_rho)};
}

Outcome conservation() {
  ClassicalRunOptions opt;  // 1000 members over T = 2000
  const auto cq = classical_quench(cache(), {kN, kUN, kX0, 0.3}, 0.1, opt);
  const bool drift_ok = cq.series.max_energy_drift < kEnergyDrift && cq.series.max_norm_drift < kNormDrift &&
                        cq.ensemble.members.size() == 1000;

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.02, 1.0), phase(0.0, 6.283185307179586);
  const auto p = ModelParams::from_interaction(kUN, kN, 0.1);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    ClassicalState s;
    double sum = 0.0;
    for (auto& n : s.n) sum += (n = u(rng));
    for (auto& n : s.n) n *= classical_total(kN) / sum;
    for (auto& f : s.phi) f = phase(rng);
    const auto v = equations_of_motion(s, p);
    const auto fd = oracle::finite_difference_velocity(s, p, 1e-5);
    for (int i = 0; i < 4; ++i)
      worst = std::max({worst, std::abs(v.ndot[i] - fd.ndot[i]), std::abs(v.phidot[i] - fd.phidot[i])});
  }
  return {drift_ok && worst < kGradientTol,
          fmt::format("{} members: max |dH|/|H| = {:.2e}, max |d sum n| = {:.2e}; gradient error {:.2e}",
                      cq.ensemble.members.size(), cq.series.max_energy_drift, cq.series.max_norm_drift, worst)};
}

Outcome classical_vs_quantum() {
  const QuenchQuery q{kN, kUN, kX0, 0.3};
  ClassicalRunOptions opt;
  const auto c_weak = classical_quench(cache(), q, 0.01, opt);
  const auto q_weak = quantum_quench(cache(), q, 0.01);
  const auto c_strong = classical_quench(cache(), q, 0.1, opt);
  const auto q_strong = quantum_quench(cache(), q, 0.1);
  const bool ok = c_weak.delta_rho.value < kC && q_weak.delta_rho > kC &&
                  c_strong.delta_rho.value > q_strong.delta_rho;
  return {ok, fmt::format("omega 0.01: classical {:.4f} +- {:.4f}, quantum {:.4f}; omega 0.1: classical "
                          "{:.4f} +- {:.4f}, quantum {:.4f}",
                          c_weak.delta_rho.value, c_weak.delta_rho.stderr_, q_weak.delta_rho,
                          c_strong.delta_rho.value, c_strong.delta_rho.stderr_, q_strong.delta_rho)};
}

Outcome scaling_collapse() {
  SpectrumCache local(1);
  const auto st = scaling_study(local, {kN, kUN, kX0, 0.25}, {20, 30, 40, 50});
  std::string per_n;
  for (const auto& c : st.curves)
    per_n += c.omega_T_N ? fmt::format(" N={}:{:.3f}", c.N, *c.omega_T_N) : fmt::format(" N={}:none", c.N);
  const bool all_cross = std::all_of(st.curves.begin(), st.curves.end(),
                                     [](const ScalingCurve& c) { return c.omega_T_N.has_value(); });
  const bool ok = st.collapse_metric < kCollapseTol && st.fit.rms < kFitRmsTol && all_cross &&
                  st.omega_T_N_spread < kSpreadTol;
  return {ok, fmt::format("collapse {:.4f}; fit a = {:.4f}, b = {:.4f}, rms {:.4f}; omega_T N{}; spread {:.1f}%",
                          st.collapse_metric, st.fit.a, st.fit.b, st.fit.rms, per_n, 100 * st.omega_T_N_spread)};
}

Outcome spacing() {
  std::vector<int> Ns;
  for (int n = 20; n <= 60; n += 5) Ns.push_back(n);
  const auto st = spacing_scaling(cache(), kUN, kX0, Ns, SpacingWindow::between(0.2, 0.3));
  const bool ok = st.global_fit.max_relative < kSpacingRel && st.local_fit.max_relative < kSpacingRel;
  return {ok, fmt::format("global a = {:.3f}, b = {:.3f}, max rel {:.2f}%; local a = {:.3f}, b = {:.3f}, "
                          "max rel {:.2f}%",
                          st.global_fit.a, st.global_fit.b, 100 * st.global_fit.max_relative, st.local_fit.a,
                          st.local_fit.b, 100 * st.local_fit.max_relative)};
}

Outcome synthetic() {
  constexpr double a = 0.37, b = 0.8;
  // threshold of a / (omega + b) at c lies at a / c - b
  ThresholdOptions opt;
  opt.c = 0.1;
  opt.grid = log_grid(0.5, 20.0, 9);
  opt.max_bisections = 60;
  const auto th = find_threshold([&](double w) { return SweepPoint{w, a / (w + b), 0.0}; }, opt);
  const double th_err = std::abs(th.omega_T - (a / opt.c - b));

  std::vector<double> x, y, n, s;
  for (double v : opt.grid) {
    x.push_back(v);
    y.push_back(a / (v + b));
  }
  const auto f = fit_inverse_shift(x, y);
  for (int k = 20; k <= 60; k += 5) {
    n.push_back(k);
    s.push_back(24.3 / k + 62.2 / (k * k));
  }
  const auto g = fit_inverse_quadratic(n, s);
  const double fit_err = std::max({std::abs(f.a - a), std::abs(f.b - b), std::abs(g.a - 24.3), std::abs(g.b - 62.2)});
  return {th_err < kSyntheticTol && fit_err < kSyntheticTol,
          fmt::format("threshold error {:.2e}; fit parameter error {:.2e}", th_err, fit_err)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "combinatorics oracle", combinatorics},
      {2, "rotation symmetry", symmetry},
      {3, "propagator cross-validation", propagator},
      {4, "random-matrix calibration", random_matrix},
      {5, "chaos map structure", chaos_structure},
      {6, "thermalization dichotomy", dichotomy},
      {7, "strong-coupling rescue", rescue},
      {8, "classical conservation", conservation},
      {9, "classical vs quantum", classical_vs_quantum},
      {10, "scaling collapse", scaling_collapse},
      {11, "level-spacing scaling", spacing},
      {12, "synthetic fits", synthetic},
  };
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--criterion") only = std::atoi(argv[i + 1]);

  int failures = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << fmt::format("criterion {:2d} {}: {} ({:.1f} s) {}\n", c.id, c.name, o.pass ? "PASS" : "FAIL",
                             secs, o.detail)
              << std::flush;
    if (!o.pass) ++failures;
  }
  return failures ? 1 : 0;
}
