// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bhtherm {

struct FitResult {
  std::string model;
  double a = 0.0;
  double b = 0.0;
  std::vector<double> residuals;  ///< y - model(x)
  double rms = 0.0;
  double max_relative = 0.0;      ///< max |residual / y|
  int iterations = 0;
  bool converged = false;
};

/// y = a / (x + b) with the pole kept left of the data (x + b > 0). Starts
/// from a scan over b with a profiled out and refines with damped Gauss-Newton.
FitResult fit_inverse_shift(std::span<const double> x, std::span<const double> y);

/// y = a / x + b / x^2 by linear least squares.
FitResult fit_inverse_quadratic(std::span<const double> x, std::span<const double> y);

/// n points from lo to hi, equally spaced in log.
std::vector<double> log_grid(double lo, double hi, int n);

/// Root of f(x) = c between the bracketing nodes x[i] and x[i + 1] of a
/// monotone piecewise-cubic (Fritsch-Carlson) interpolant through (log x, y).
/// x ascending and positive. nullopt if y[i] - c and y[i + 1] - c do not
/// differ in sign.
std::optional<double> monotone_crossing(std::span<const double> x, std::span<const double> y,
                                        std::size_t i, double c);

}  // namespace bhtherm
