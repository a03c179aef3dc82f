// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "bhtherm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include <fmt/format.h>

#include "bhtherm/error.hpp"

namespace bhtherm {

Spectrum diagonalize(const HamiltonianMatrix& h) {
  require(h.dimension() >= 1, "diagonalize: empty matrix");
  EigenPairs pairs = symmetric_eigen(Eigen::MatrixXd(h.matrix));
  return Spectrum{std::move(pairs.values), std::move(pairs.vectors), h.params};
}

std::vector<UncoupledLevel> label_uncoupled_levels(const std::vector<UncoupledBlock>& blocks,
                                                   const std::vector<Spectrum>& block_spectra) {
  require(blocks.size() == block_spectra.size(),
          "label_uncoupled_levels: one spectrum per block required");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : block_spectra) {
    if (s.size() == 0) continue;
    lo = std::min(lo, s.values.minCoeff());
    hi = std::max(hi, s.values.maxCoeff());
  }
  const double range = hi - lo;

  std::vector<UncoupledLevel> levels;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& s = block_spectra[b];
    require(s.size() == blocks[b].block.dimension(), "label_uncoupled_levels: size mismatch");
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      UncoupledLevel l;
      l.x = blocks[b].x;
      l.nu = static_cast<int>(k);
      l.energy = s.values(k);
      l.eps = range > 0.0 ? (l.energy - lo) / range : 0.0;
      l.block = b;
      levels.push_back(l);
    }
  }
  return levels;
}

std::vector<double> UncoupledSpectrum::energies() const {
  std::vector<double> e;
  e.reserve(levels.size());
  for (const auto& l : levels) e.push_back(l.energy);
  std::sort(e.begin(), e.end());
  return e;
}

Eigen::VectorXd UncoupledSpectrum::sector_vector(std::size_t level, std::size_t sector_dim) const {
  const UncoupledLevel& l = levels.at(level);
  const UncoupledBlock& b = blocks[l.block];
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sector_dim));
  const auto& vecs = block_spectra[l.block].vectors;
  for (std::size_t k = 0; k < b.indices.size(); ++k)
    v(static_cast<Eigen::Index>(b.indices[k])) = vecs(static_cast<Eigen::Index>(k), l.nu);
  return v;
}

std::vector<std::size_t> UncoupledSpectrum::levels_in_block(int trimer) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i].x.trimer == trimer) out.push_back(i);
  return out;
}

UncoupledSpectrum diagonalize_uncoupled(const ModelParams& params, const SectorBasis& sector) {
  UncoupledSpectrum out;
  out.params = params;
  out.params.omega = 0.0;
  out.blocks = uncoupled_blocks(params, sector);
  out.block_spectra.reserve(out.blocks.size());
  for (const auto& b : out.blocks) out.block_spectra.push_back(diagonalize(b.block));
  out.levels = label_uncoupled_levels(out.blocks, out.block_spectra);
  return out;
}

std::vector<double> trim_edges(std::span<const double> levels, double fraction) {
  const auto cut = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(levels.size())));
  if (2 * cut >= levels.size()) return {};
  return {levels.begin() + static_cast<std::ptrdiff_t>(cut),
          levels.end() - static_cast<std::ptrdiff_t>(cut)};
}

namespace {

void legendre_row(double t, int degree, Eigen::MatrixXd& a, Eigen::Index row) {
  a(row, 0) = 1.0;
  if (degree >= 1) a(row, 1) = t;
  for (int k = 2; k <= degree; ++k)
    a(row, k) = ((2.0 * k - 1.0) * t * a(row, k - 1) - (k - 1.0) * a(row, k - 2)) / k;
}

bool is_ascending(std::span<const double> levels) {
  return std::is_sorted(levels.begin(), levels.end());
}

}  // namespace

std::vector<double> unfold_spectrum(std::span<const double> levels, const UnfoldOptions& options) {
  require(is_ascending(levels), "unfold_spectrum: levels must be ascending");
  require(options.degree >= 1, "unfold_spectrum: degree must be >= 1");
  const std::vector<double> e = trim_edges(levels, options.edge_fraction);
  if (e.size() < 50) {
    throw Error(fmt::format(
        "unfold_spectrum: {} levels after edge trimming, need >= 50 for a staircase fit; "
        "use spacing_ratio (no unfolding needed) instead",
        e.size()));
  }
  const auto n = static_cast<Eigen::Index>(e.size());
  const double lo = e.front(), hi = e.back();
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);

  Eigen::MatrixXd a(n, options.degree + 1);
  Eigen::VectorXd staircase(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    legendre_row((e[static_cast<std::size_t>(i)] - mid) / half, options.degree, a, i);
    staircase(i) = static_cast<double>(i) + 0.5;
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(staircase);
  const Eigen::VectorXd mapped = a * coef;

  std::vector<double> s(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i + 1 < n; ++i) s[static_cast<std::size_t>(i)] = mapped(i + 1) - mapped(i);
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  for (double& v : s) v /= mean;
  return s;
}

double RatioSeries::mean() const {
  if (r.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
}

RatioSeries spacing_ratio(std::span<const double> levels) {
  require(is_ascending(levels), "spacing_ratio: levels must be ascending");
  RatioSeries out;
  if (levels.size() < 3) return out;
  out.r.reserve(levels.size() - 2);
  for (std::size_t i = 0; i + 2 < levels.size(); ++i) {
    const double g0 = levels[i + 1] - levels[i];
    const double g1 = levels[i + 2] - levels[i + 1];
    const double big = std::max(g0, g1);
    if (big == 0.0) {
      ++out.skipped_degenerate;
      continue;
    }
    out.r.push_back(std::min(g0, g1) / big);
  }
  return out;
}

ChaosMap chaos_map(const UncoupledSpectrum& spectrum, int window) {
  require(window >= 3, "chaos_map: window must be >= 3");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ChaosMap map;
  map.window = window;
  for (std::size_t b = 0; b < spectrum.blocks.size(); ++b) {
    const auto idx = spectrum.levels_in_block(spectrum.blocks[b].x.trimer);
    std::vector<double> e, eps;
    for (auto i : idx) {
      e.push_back(spectrum.levels[i].energy);
      eps.push_back(spectrum.levels[i].eps);
    }
    const auto n = static_cast<int>(e.size());
    if (n < window) {
      ChaosCell c;
      c.x = spectrum.blocks[b].x;
      c.eps = n > 0 ? std::accumulate(eps.begin(), eps.end(), 0.0) / n : nan;
      c.mean_r = nan;
      c.n_levels = n;
      c.empty = true;
      map.cells.push_back(c);
      continue;
    }
    for (int start = 0; start + window <= n; ++start) {
      const std::span<const double> w(e.data() + start, static_cast<std::size_t>(window));
      const RatioSeries rs = spacing_ratio(w);
      ChaosCell c;
      c.x = spectrum.blocks[b].x;
      c.eps = eps[static_cast<std::size_t>(start + window / 2)];
      c.n_levels = window;
      c.empty = rs.r.empty();
      c.mean_r = c.empty ? nan : rs.mean();
      map.cells.push_back(c);
    }
  }
  return map;
}

int ChaosGrid::eps_bin(double eps) const {
  const int k = static_cast<int>(std::floor(eps * eps_bins));
  return std::clamp(k, 0, eps_bins - 1);
}

int ChaosGrid::x_row(double x) const {
  int best = 0;
  for (int i = 1; i < static_cast<int>(xs.size()); ++i)
    if (std::abs(xs[static_cast<std::size_t>(i)].value() - x) <
        std::abs(xs[static_cast<std::size_t>(best)].value() - x))
      best = i;
  return best;
}

ChaosGrid rasterize(const ChaosMap& map, int eps_bins) {
  require(eps_bins >= 1, "rasterize: eps_bins must be >= 1");
  ChaosGrid grid;
  grid.eps_bins = eps_bins;
  for (const auto& c : map.cells)
    if (grid.xs.empty() || grid.xs.back() != c.x) grid.xs.push_back(c.x);
  const auto rows = static_cast<Eigen::Index>(grid.xs.size());
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(rows, eps_bins);
  Eigen::MatrixXi count = Eigen::MatrixXi::Zero(rows, eps_bins);
  std::size_t row = 0;
  for (const auto& c : map.cells) {
    while (grid.xs[row] != c.x) ++row;
    if (c.empty) continue;
    const int col = grid.eps_bin(c.eps);
    sum(static_cast<Eigen::Index>(row), col) += c.mean_r;
    count(static_cast<Eigen::Index>(row), col) += 1;
  }
  grid.values.resize(rows, eps_bins);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < eps_bins; ++j)
      grid.values(i, j) = count(i, j) > 0 ? sum(i, j) / count(i, j)
                                          : std::numeric_limits<double>::quiet_NaN();
  return grid;
}

std::vector<std::pair<int, int>> connected_region(const ChaosGrid& grid, int row, int col,
                                                  double threshold) {
  const auto rows = static_cast<int>(grid.values.rows());
  const auto cols = static_cast<int>(grid.values.cols());
  auto passes = [&](int i, int j) {
    return i >= 0 && j >= 0 && i < rows && j < cols && grid.values(i, j) > threshold;
  };
  std::vector<std::pair<int, int>> region;
  if (!passes(row, col)) return region;
  std::vector<char> seen(static_cast<std::size_t>(rows * cols), 0);
  std::queue<std::pair<int, int>> todo;
  todo.emplace(row, col);
  seen[static_cast<std::size_t>(row * cols + col)] = 1;
  while (!todo.empty()) {
    auto [i, j] = todo.front();
    todo.pop();
    region.emplace_back(i, j);
    for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      const int a = i + di, b = j + dj;
      if (!passes(a, b) || seen[static_cast<std::size_t>(a * cols + b)]) continue;
      seen[static_cast<std::size_t>(a * cols + b)] = 1;
      todo.emplace(a, b);
    }
  }
  std::sort(region.begin(), region.end());
  return region;
}

double mean_level_spacing(std::span<const double> levels, const SpacingWindow& window) {
  require(is_ascending(levels), "mean_level_spacing: levels must be ascending");
  if (levels.size() < 2) throw Error("mean_level_spacing: need at least two levels");
  const double lo = levels.front(), hi = levels.back();
  if (!window.local) return (hi - lo) / static_cast<double>(levels.size() - 1);

  const double range = hi - lo;
  double first = 0.0, last = 0.0;
  std::size_t count = 0;
  for (double e : levels) {
    const double eps = range > 0.0 ? (e - lo) / range : 0.0;
    if (eps < window.eps_lo || eps > window.eps_hi) continue;
    if (count == 0) first = e;
    last = e;
    ++count;
  }
  if (count < 2) {
    throw Error(fmt::format("mean_level_spacing: {} levels with eps in [{}, {}], need >= 2", count,
                            window.eps_lo, window.eps_hi));
  }
  return (last - first) / static_cast<double>(count - 1);
}

}  // namespace bhtherm
