// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "bhtherm/error.hpp"
#include "bhtherm/qdyn.hpp"
#include "support/oracles.hpp"

using namespace bhtherm;

namespace {

struct Model {
  int N;
  SectorBasis sector;
  UncoupledSpectrum uncoupled;
  HamiltonianMatrix h;
  std::shared_ptr<const Spectrum> spectrum;

  Model(int n, double omega, double UN = 10.0)
      : N(n),
        sector(n),
        uncoupled(diagonalize_uncoupled(ModelParams::from_interaction(UN, n, 0.0), sector)),
        h(build_hamiltonian(ModelParams::from_interaction(UN, n, omega), sector)),
        spectrum(std::make_shared<const Spectrum>(diagonalize(h))) {}
};

}  // namespace

TEST(Evolve, MatchesDirectIntegration) {
  const Model s(8, 0.3);
  const auto init = prepare_initial(s.uncoupled, s.spectrum, 0.5, 0.3);
  const Eigen::MatrixXd H(s.h.matrix);
  for (double t : {0.7, 13.0}) {
    const Eigen::VectorXcd ref = oracle::rk4_schrodinger(H, init.sector_vector.cast<std::complex<double>>(), t, 2e-4);
    const Eigen::VectorXcd got = evolve(init.state, t).sector_amplitudes();
    EXPECT_LT((got - ref).cwiseAbs().maxCoeff(), 1e-8) << t;
  }
}

TEST(Evolve, ComposesAndConservesNorm) {
  const Model s(12, 0.1);
  const auto init = prepare_initial(s.uncoupled, s.spectrum, 0.5, 0.3);
  const auto a = evolve(evolve(init.state, 3.0), 4.5);
  const auto b = evolve(init.state, 7.5);
  EXPECT_LT((a.coeffs - b.coeffs).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_DOUBLE_EQ(a.time, 7.5);
  EXPECT_NEAR(b.sector_amplitudes().norm(), 1.0, 1e-12);
  // time reversal
  const auto back = evolve(b, -7.5);
  EXPECT_LT((back.sector_amplitudes() - init.sector_vector.cast<std::complex<double>>()).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(Initial, ExactXAndNearestEps) {
  const Model s(20, 0.1);
  EXPECT_EQ(trimer_for(s.uncoupled, 0.6), 12);
  EXPECT_THROW(trimer_for(s.uncoupled, 0.62), Error);
  EXPECT_THROW(trimer_for(s.uncoupled, 0.05), Error);  // k = 1 has no sector states
  const auto level = select_level(s.uncoupled, 12, 0.3);
  for (auto i : s.uncoupled.levels_in_block(12))
    EXPECT_LE(std::abs(s.uncoupled.levels[level].eps - 0.3), std::abs(s.uncoupled.levels[i].eps - 0.3));
  const auto init = prepare_initial(s.uncoupled, s.spectrum, 0.6, 0.3);
  const auto p0 = population_distribution(init.state, s.sector);
  EXPECT_NEAR(p0.p(12), 1.0, 1e-12);
  EXPECT_NEAR(p0.p.sum(), 1.0, 1e-12);
}

TEST(Population, SeriesAgreesWithPointwise) {
  const Model s(16, 0.2);
  const auto init = prepare_initial(s.uncoupled, s.spectrum, 0.5, 0.4);
  std::vector<double> times;
  for (int i = 0; i < 70; ++i) times.push_back(0.37 * i);
  const auto series = population_series(init.state, s.sector, times);
  ASSERT_EQ(series.size(), times.size());
  for (std::size_t i = 0; i < times.size(); i += 9) {
    const auto d = population_distribution(evolve(init.state, times[i]), s.sector);
    EXPECT_LT((series[i].p - d.p).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(series[i].p.sum(), 1.0, 1e-12);
  }
}

TEST(Population, GlobalPhaseDoesNotMatter) {
  const Model s(14, 0.2);
  auto init = prepare_initial(s.uncoupled, s.spectrum, 0.5, 0.3);
  auto rotated = init.state;
  rotated.coeffs *= std::polar(1.0, 1.234);
  const auto a = population_distribution(evolve(init.state, 5.0), s.sector);
  const auto b = population_distribution(evolve(rotated, 5.0), s.sector);
  EXPECT_LT((a.p - b.p).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(TimeAverage, ApproachesDiagonalEnsemble) {
  const Model s(14, 0.3);
  const auto init = prepare_initial(s.uncoupled, s.spectrum, 0.5, 0.3);
  const auto de = oracle::diagonal_ensemble(init.state, s.sector);
  const auto avg = time_average(init.state, s.sector, 1e4, 2e5, 20000);
  EXPECT_LT((avg.p - de.p).norm(), 5e-3);
  EXPECT_EQ(avg.samples, 20000);
}

TEST(Uncoupled, PopulationIsFrozen) {
  const Model s(16, 0.0);
  const auto init = prepare_initial(s.uncoupled, s.spectrum, 0.5, 0.3);
  const auto avg = time_average(init.state, s.sector, 0.0, 500.0, 50);
  EXPECT_NEAR(avg.p(8), 1.0, 1e-10);
}

TEST(Entropy, KnownValues) {
  auto d = MonomerDensity::zeros(3);
  d.p << 0.25, 0.25, 0.25, 0.25;
  EXPECT_NEAR(entropy(d), std::log(4.0), 1e-15);
  d.p << 1.0, 0.0, 0.0, 0.0;
  EXPECT_EQ(entropy(d), 0.0);
}

TEST(Thermal, GaussianWindowWeights) {
  const Model s(16, 0.1);
  const auto& levels = s.uncoupled.levels;
  const double E0 = levels[levels.size() / 2].energy;
  const auto th = thermal_reference(s.uncoupled, E0, 0.8);
  EXPECT_NEAR(th.density.p.sum(), 1.0, 1e-13);
  Eigen::VectorXd ref = Eigen::VectorXd::Zero(17);
  for (const auto& l : levels) ref(l.x.trimer) += std::exp(-0.5 * std::pow((l.energy - E0) / 0.8, 2));
  ref /= ref.sum();
  EXPECT_LT((th.density.p - ref).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(thermal_reference(s.uncoupled, E0, 0.0), ContractViolation);
  EXPECT_THROW(thermal_reference(s.uncoupled, 1e6, 0.1), Error);
}

TEST(DeltaRho, IsTheEuclideanDistance) {
  auto a = MonomerDensity::zeros(2), b = MonomerDensity::zeros(2);
  a.p << 1.0, 0.0, 0.0;
  b.p << 0.0, 0.0, 1.0;
  EXPECT_NEAR(delta_rho(a, b), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(delta_rho(a, a), 0.0);
  EXPECT_THROW(delta_rho(a, MonomerDensity::zeros(3)), ContractViolation);
}

TEST(EnergyMoments, BothFormsAgree) {
  const Model s(16, 0.2);
  const auto init = prepare_initial(s.uncoupled, s.spectrum, 0.5, 0.3);
  const auto a = energy_moments(s.h, init.sector_vector);
  const auto b = energy_moments(init.state);
  EXPECT_NEAR(a.mean, b.mean, 1e-10);
  EXPECT_NEAR(a.width, b.width, 1e-8);
  EXPECT_GT(a.width, 0.0);
}

TEST(Quench, ReportsConsistentSummary) {
  const Model s(20, 0.2);
  const AveragingOptions opt{400.0, 0.5, 80};
  const auto r = run_quench(s.sector, s.uncoupled, s.h, s.spectrum, 0.6, 0.3, opt);
  EXPECT_EQ(r.initial.x.trimer, 12);
  EXPECT_NEAR(r.average.p.sum(), 1.0, 1e-12);
  EXPECT_NEAR(r.delta_rho, delta_rho(r.average, r.thermal.density), 1e-15);
  EXPECT_NEAR(r.entropy_thermal, entropy(r.thermal.density), 1e-15);
  EXPECT_DOUBLE_EQ(r.average.t_lo, 200.0);
  EXPECT_DOUBLE_EQ(r.thermal.DeltaE, r.energy.width);
  EXPECT_GE(r.delta_rho_error, 0.0);
  // deterministic
  const auto again = run_quench(s.sector, s.uncoupled, s.h, s.spectrum, 0.6, 0.3, opt);
  EXPECT_EQ(again.delta_rho, r.delta_rho);
}

TEST(Quench, ZeroCouplingUsesDeltaWindow) {
  const Model s(16, 0.0);
  const auto r = run_quench(s.sector, s.uncoupled, s.h, s.spectrum, 0.5, 0.3, {100.0, 0.5, 10});
  EXPECT_EQ(r.energy.width < 1e-10, true);
  EXPECT_TRUE(std::isfinite(r.delta_rho));
  EXPECT_NEAR(r.thermal.density.p.sum(), 1.0, 1e-12);
}

TEST(Quench, WeakCouplingConvergesToUncoupledLimit) {
  const int n = 16;
  const Model free(n, 0.0);
  const auto r0 = run_quench(free.sector, free.uncoupled, free.h, free.spectrum, 0.5, 0.3, {50.0, 0.5, 20});
  double previous = 1.0;
  for (double w : {1e-2, 1e-3, 1e-4}) {
    const Model s(n, w);
    const auto r = run_quench(s.sector, s.uncoupled, s.h, s.spectrum, 0.5, 0.3, {50.0, 0.5, 20});
    const double d = (r.average.p - r0.average.p).norm();
    EXPECT_LT(d, previous);
    previous = d;
  }
  EXPECT_LT(previous, 1e-4);
}
