// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "bhtherm/analysis.hpp"
#include "bhtherm/error.hpp"

using namespace bhtherm;

namespace {

DeltaRhoEvaluator synthetic(double a, double b, int* calls = nullptr) {
  return [=](double w) {
    if (calls) ++*calls;
    return SweepPoint{w, a / (w + b), 0.0};
  };
}

}  // namespace

TEST(Threshold, BracketsAndInterpolates) {
  int calls = 0;
  ThresholdOptions opt;
  opt.max_bisections = 3;
  const auto r = find_threshold(synthetic(0.02, 0.05, &calls), opt);
  EXPECT_EQ(r.status, ThresholdStatus::crossing);
  EXPECT_EQ(r.method, "interpolation");
  EXPECT_LE(r.bracket_lo, r.omega_T);
  EXPECT_GE(r.bracket_hi, r.omega_T);
  EXPECT_NEAR(r.omega_T, 0.15, 0.01);
  // walk stops at the first grid point below c, then three bisections
  const auto g = log_grid(0.01, 1.0, 13);
  const auto first_below = std::find_if(g.begin(), g.end(), [](double w) { return 0.02 / (w + 0.05) < 0.1; });
  EXPECT_EQ(calls, static_cast<int>(first_below - g.begin()) + 1 + 3);
  for (std::size_t i = 1; i < r.sweep.size(); ++i) EXPECT_LT(r.sweep[i - 1].omega, r.sweep[i].omega);
}

TEST(Threshold, ConvergesUnderBisection) {
  ThresholdOptions opt;
  opt.max_bisections = 40;
  const auto r = find_threshold(synthetic(0.02, 0.05), opt);
  EXPECT_NEAR(r.omega_T, 0.15, 1e-9);
}

TEST(Threshold, BoundsOutsideTheGrid) {
  const auto low = find_threshold(synthetic(1e-4, 0.0));
  EXPECT_EQ(low.status, ThresholdStatus::upper_bound);
  EXPECT_DOUBLE_EQ(low.omega_T, 0.01);
  EXPECT_EQ(low.sweep.size(), 1u);
  const auto high = find_threshold(synthetic(10.0, 0.0));
  EXPECT_EQ(high.status, ThresholdStatus::above_grid);
  EXPECT_DOUBLE_EQ(high.omega_T, 1.0);
  EXPECT_EQ(high.sweep.size(), 13u);
  EXPECT_STREQ(to_string(ThresholdStatus::above_grid), "above_grid");
}

TEST(Threshold, ValidatesGrid) {
  ThresholdOptions opt;
  opt.grid = {0.1, 0.05};
  EXPECT_THROW(find_threshold(synthetic(1, 1), opt), ContractViolation);
  opt.grid = {};
  EXPECT_THROW(find_threshold(synthetic(1, 1), opt), ContractViolation);
}

TEST(Collapse, MetricIsMaxPairwiseRms) {
  ScalingCurve a, b, c;
  for (double s : {1.0, 2.0, 3.0, 4.0}) {
    a.points.push_back({s, 1.0 / s, 0.0});
    b.points.push_back({s, 1.0 / s + 0.1, 0.0});
    c.points.push_back({s, 1.0 / s, 0.0});
  }
  EXPECT_NEAR(collapse_metric({a, c}), 0.0, 1e-15);
  EXPECT_NEAR(collapse_metric({a, b, c}), 0.1, 1e-12);
  b.points.pop_back();
  EXPECT_THROW(collapse_metric({a, b}), ContractViolation);
}

TEST(Cache, ReusesAndEvicts) {
  SpectrumCache cache(1);
  const auto s1 = cache.coupled(10, 10.0, 0.1);
  const auto s2 = cache.coupled(10, 10.0, 0.1);
  EXPECT_EQ(s1.get(), s2.get());
  const auto before = cache.diagonalizations();
  cache.coupled(10, 10.0, 0.2);
  cache.coupled(10, 10.0, 0.1);
  EXPECT_EQ(cache.diagonalizations(), before + 2);
  EXPECT_EQ(cache.sector(10).get(), cache.sector(10).get());
}

TEST(Quench, QuantumEvaluatorMatchesDirectRun) {
  SpectrumCache cache;
  const QuenchQuery q{12, 10.0, 0.5, 0.3};
  const AveragingOptions avg{200.0, 0.5, 40};
  const auto r = quantum_quench(cache, q, 0.2, avg);
  const auto p = quantum_evaluator(cache, q, avg)(0.2);
  EXPECT_EQ(p.delta_rho, r.delta_rho);
  EXPECT_EQ(p.error, r.delta_rho_error);
}

TEST(Quench, ClassicalRunUsesTheQuantumShell) {
  SpectrumCache cache;
  const QuenchQuery q{12, 10.0, 0.5, 0.3};
  ClassicalRunOptions opt;
  opt.members = 8;
  opt.averaging = {40.0, 0.5, 10};
  opt.bootstrap_resamples = 20;
  const auto r = classical_quench(cache, q, 0.2, opt);
  const auto qr = quantum_quench(cache, q, 0.2, opt.averaging);
  EXPECT_NEAR(r.E_target, qr.energy.mean, 1e-12);
  EXPECT_EQ(r.ensemble.members.size(), 8u);
  EXPECT_LT((r.thermal.density.p - qr.thermal.density.p).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(r.series.window_average.p.sum(), 1.0, 1e-12);
  const auto times = classical_times(opt.averaging);
  EXPECT_DOUBLE_EQ(times.back(), 40.0);
  EXPECT_EQ(std::count_if(times.begin(), times.end(), [](double t) { return t >= 20.0; }), 10);
}

TEST(Scan, RecordsFailuresAndContinues) {
  SpectrumCache cache;
  ScanOptions opt;
  opt.run_classical = false;
  opt.averaging = {100.0, 0.5, 20};
  opt.threshold.grid = log_grid(0.05, 1.0, 4);
  opt.threshold.max_bisections = 0;
  const auto rows = scan_epsilon(cache, {12, 10.0, 0.5, 0.3}, {0.3, 0.5}, opt);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.quantum.has_value());
    EXPECT_TRUE(r.error.empty());
  }
  const auto bad = scan_interaction(cache, {12, 10.0, 0.55, 0.3}, {10.0}, opt);
  ASSERT_EQ(bad.size(), 1u);
  EXPECT_FALSE(bad[0].quantum.has_value());
  EXPECT_FALSE(bad[0].error.empty());
}

TEST(Scaling, RefusesTooFewSizes) {
  SpectrumCache cache;
  EXPECT_THROW(scaling_study(cache, {}, {20, 30, 40}), ContractViolation);
  EXPECT_THROW(spacing_scaling(cache, 10.0, 0.6, {20, 30}), ContractViolation);
}

TEST(Spacing, FitsTheBlockSpacings) {
  SpectrumCache cache;
  const auto st = spacing_scaling(cache, 10.0, 0.6, {20, 25, 30, 35}, SpacingWindow::between(0.0, 1.0));
  ASSERT_EQ(st.rows.size(), 4u);
  for (std::size_t i = 1; i < st.rows.size(); ++i) EXPECT_LT(st.rows[i].global, st.rows[i - 1].global);
  for (const auto& r : st.rows) EXPECT_NEAR(r.local, r.global, 1e-12);
  EXPECT_EQ(st.global_fit.residuals.size(), 4u);
}
