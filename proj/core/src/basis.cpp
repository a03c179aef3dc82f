// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "bhtherm/basis.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "bhtherm/error.hpp"

namespace bhtherm {

namespace {

void compose(int remaining, int mode, std::vector<int>& current,
             std::vector<std::vector<int>>& out) {
  const int modes = static_cast<int>(current.size());
  if (mode == modes - 1) {
    current[mode] = remaining;
    out.push_back(current);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    current[mode] = k;
    compose(remaining - k, mode + 1, current, out);
  }
}

}  // namespace

FullBasis::FullBasis(int modes, int total) : modes_(modes), total_(total) {
  require(modes >= 1, "FullBasis: modes must be >= 1");
  require(total >= 0, "FullBasis: total must be >= 0");
  std::vector<int> current(modes, 0);
  compose(total, 0, current, states_);
  for (std::size_t i = 0; i < states_.size(); ++i) lookup_.emplace(states_[i], i);
}

std::optional<std::size_t> FullBasis::index(const std::vector<int>& occupations) const {
  auto it = lookup_.find(occupations);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

FullBasis enumerate_full_basis(int modes, int total) { return FullBasis(modes, total); }

SectorBasis::SectorBasis(int total) : total_(total) {
  require(total >= 0, "SectorBasis: total must be >= 0");
  // n1 descending, then the strictly decreasing trimer triple descending.
  for (int n1 = total; n1 >= 0; --n1) {
    const int t = total - n1;
    for (int a = t; a >= 0; --a) {
      for (int b = std::min(a - 1, t - a); b >= 0; --b) {
        const int c = t - a - b;
        if (c < 0 || c >= b) continue;
        FockState s{{n1, a, b, c}};
        lookup_.emplace(s, reps_.size());
        reps_.push_back(s);
      }
    }
  }
}

std::array<SignedState, 6> SectorBasis::expansion(std::size_t i) const {
  const auto& r = reps_.at(i).n;
  const int n1 = r[0], a = r[1], b = r[2], c = r[3];
  return {{
      {{{n1, a, b, c}}, +1},
      {{{n1, c, a, b}}, +1},
      {{{n1, b, c, a}}, +1},
      {{{n1, b, a, c}}, -1},
      {{{n1, c, b, a}}, -1},
      {{{n1, a, c, b}}, -1},
  }};
}

double SectorBasis::amplitude() { return 1.0 / std::sqrt(6.0); }

std::optional<std::pair<std::size_t, int>> SectorBasis::locate(const FockState& s) const {
  std::array<int, 3> t{s.n[1], s.n[2], s.n[3]};
  int sign = 1;
  // three-element sort, tracking the permutation parity
  if (t[0] < t[1]) { std::swap(t[0], t[1]); sign = -sign; }
  if (t[1] < t[2]) { std::swap(t[1], t[2]); sign = -sign; }
  if (t[0] < t[1]) { std::swap(t[0], t[1]); sign = -sign; }
  if (t[0] == t[1] || t[1] == t[2]) return std::nullopt;
  auto it = lookup_.find(FockState{{s.n[0], t[0], t[1], t[2]}});
  if (it == lookup_.end()) return std::nullopt;
  return std::make_pair(it->second, sign);
}

SectorBasis build_sector_basis(int total) { return SectorBasis(total); }

std::vector<double> apply_trimer_rotation(const FullBasis& basis, std::span<const double> v) {
  require(basis.modes() == kModes, "apply_trimer_rotation: basis must have 4 modes");
  require(v.size() == basis.size(),
          "apply_trimer_rotation: vector dimension " + std::to_string(v.size()) +
              " != basis size " + std::to_string(basis.size()));
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& s = basis.state(i);
    const std::vector<int> rotated{s[0], s[3], s[1], s[2]};
    out[*basis.index(rotated)] = v[i];
  }
  return out;
}

std::vector<std::vector<double>> sector_columns(const FullBasis& full, const SectorBasis& sector) {
  require(full.modes() == kModes && full.total() == sector.total(),
          "sector_columns: full basis and sector disagree on N");
  std::vector<std::vector<double>> cols(sector.size(), std::vector<double>(full.size(), 0.0));
  for (std::size_t j = 0; j < sector.size(); ++j) {
    for (const auto& [state, sign] : sector.expansion(j)) {
      const std::vector<int> occ(state.n.begin(), state.n.end());
      cols[j][*full.index(occ)] += sign * SectorBasis::amplitude();
    }
  }
  return cols;
}

}  // namespace bhtherm
