// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "bhtherm/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Dense>

// boost 1.74 pchip calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/tools/roots.hpp>

#include "bhtherm/error.hpp"

namespace bhtherm {

namespace {

void check_xy(std::span<const double> x, std::span<const double> y, std::size_t min_points) {
  require(x.size() == y.size(), "fit: x and y differ in length");
  require(x.size() >= min_points, "fit: too few points");
  for (std::size_t i = 0; i < x.size(); ++i)
    require(std::isfinite(x[i]) && std::isfinite(y[i]), "fit: non-finite data");
}

template <typename Model>
void finish(FitResult& r, std::span<const double> x, std::span<const double> y, Model&& model) {
  r.residuals.resize(x.size());
  double ss = 0.0;
  r.max_relative = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double res = y[i] - model(x[i]);
    r.residuals[i] = res;
    ss += res * res;
    if (y[i] != 0.0) r.max_relative = std::max(r.max_relative, std::abs(res / y[i]));
  }
  r.rms = std::sqrt(ss / static_cast<double>(x.size()));
}

}  // namespace

FitResult fit_inverse_shift(std::span<const double> x, std::span<const double> y) {
  check_xy(x, y, 2);
  const auto n = static_cast<Eigen::Index>(x.size());
  FitResult r;
  r.model = "a/(x+b)";

  const double x_min = *std::min_element(x.begin(), x.end());
  const double x_max = *std::max_element(x.begin(), x.end());
  for (double v : y) require(v > 0.0, "fit_inverse_shift: y must be positive");

  auto sse = [&](double a, double b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = x[i] + b;
      const double res = y[i] - a / d;
      s += res * res;
    }
    return s;
  };
  // best a for a fixed b is linear
  auto profile_a = [&](double b) {
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      num += y[i] / (x[i] + b);
      den += 1.0 / ((x[i] + b) * (x[i] + b));
    }
    return num / den;
  };

  // the pole must stay left of the data
  const double span = std::max(1.0, x_max - x_min);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 400; ++k) {
    const double b = -x_min + span * std::pow(10.0, -6.0 + 10.0 * k / 400.0);
    const double a = profile_a(b);
    const double s = sse(a, b);
    if (s < best) {
      best = s;
      r.a = a;
      r.b = b;
    }
  }
  auto admissible = [&](double b) { return x_min + b > 0.0; };

  double lambda = 1e-3;
  double current = sse(r.a, r.b);
  for (r.iterations = 0; r.iterations < 200; ++r.iterations) {
    Eigen::MatrixXd J(n, 2);
    Eigen::VectorXd res(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = x[i] + r.b;
      J(i, 0) = 1.0 / d;
      J(i, 1) = -r.a / (d * d);
      res(i) = y[i] - r.a / d;
    }
    const Eigen::Matrix2d JtJ = J.transpose() * J;
    const Eigen::Vector2d g = J.transpose() * res;
    bool accepted = false;
    for (int k = 0; k < 30 && !accepted; ++k) {
      Eigen::Matrix2d damped = JtJ;
      damped.diagonal() *= 1.0 + lambda;
      const Eigen::Vector2d step = damped.ldlt().solve(g);
      const double trial = sse(r.a + step(0), r.b + step(1));
      if (admissible(r.b + step(1)) && std::isfinite(trial) && trial <= current) {
        const bool small = std::abs(step(0)) <= 1e-15 * (1.0 + std::abs(r.a)) &&
                           std::abs(step(1)) <= 1e-15 * (1.0 + std::abs(r.b));
        r.a += step(0);
        r.b += step(1);
        const double previous = current;
        current = trial;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        if (small || previous - current <= 1e-30 + 1e-15 * previous) r.converged = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted || r.converged) {
      r.converged = true;
      break;
    }
  }
  finish(r, x, y, [&](double v) { return r.a / (v + r.b); });
  return r;
}

FitResult fit_inverse_quadratic(std::span<const double> x, std::span<const double> y) {
  check_xy(x, y, 2);
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    require(x[i] != 0.0, "fit_inverse_quadratic: x must be nonzero");
    A(i, 0) = 1.0 / x[i];
    A(i, 1) = 1.0 / (x[i] * x[i]);
    rhs(i) = y[i];
  }
  const Eigen::Vector2d s = A.colPivHouseholderQr().solve(rhs);
  FitResult r;
  r.model = "a/x+b/x^2";
  r.a = s(0);
  r.b = s(1);
  r.converged = true;
  finish(r, x, y, [&](double v) { return r.a / v + r.b / (v * v); });
  return r;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  require(lo > 0.0 && hi > lo && n >= 2, "log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::optional<double> monotone_crossing(std::span<const double> x, std::span<const double> y,
                                        std::size_t i, double c) {
  require(x.size() == y.size() && x.size() >= 2 && i + 1 < x.size(),
          "monotone_crossing: bad bracket index");
  for (std::size_t k = 0; k < x.size(); ++k) {
    require(x[k] > 0.0, "monotone_crossing: x must be positive");
    if (k) require(x[k] > x[k - 1], "monotone_crossing: x must be strictly ascending");
  }
  const double f0 = y[i] - c, f1 = y[i + 1] - c;
  if (f0 == 0.0) return x[i];
  if (f1 == 0.0) return x[i + 1];
  if ((f0 < 0.0) == (f1 < 0.0)) return std::nullopt;

  const double l0 = std::log(x[i]), l1 = std::log(x[i + 1]);
  if (!(l1 > l0)) return std::sqrt(x[i] * x[i + 1]);

  // nodes closer than the resolution of log x collapse; the bracket wins
  std::vector<double> lx, yy;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double l = std::log(x[k]);
    if (!lx.empty() && !(l > lx.back())) {
      if (k != i && k != i + 1) continue;
      lx.pop_back();
      yy.pop_back();
    }
    lx.push_back(l);
    yy.push_back(y[k]);
  }
  if (lx.size() < 4) {
    // too few nodes for the cubic; straight line in log x
    return std::exp(l0 + (l1 - l0) * f0 / (f0 - f1));
  }
  boost::math::interpolators::pchip<std::vector<double>> spline(std::move(lx), std::move(yy));
  auto g = [&](double t) { return spline(t) - c; };
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      g, l0, l1, f0, f1, boost::math::tools::eps_tolerance<double>(52), iters);
  return std::exp(0.5 * (lo + hi));
}

}  // namespace bhtherm
