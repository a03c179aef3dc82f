// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file basis.hpp
 * @brief Number-conserving Fock bases for the monomer + trimer system.
 *
 * Mode 0 is the monomer, modes 1..3 the trimer sites. The only symmetry
 * sector built here is the one odd under trimer transpositions and even
 * under cyclic trimer rotations; each of its vectors is
 *
 *   (1/sqrt 6) ( |n1,a,b,c> + |n1,c,a,b> + |n1,b,c,a>
 *              - |n1,b,a,c> - |n1,c,b,a> - |n1,a,c,b> )
 *
 * labelled by the representative with a > b > c.
 */

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace bhtherm {

inline constexpr int kModes = 4;

/// Occupations (n1, n2, n3, n4); n1 is the monomer.
struct FockState {
  std::array<int, kModes> n{};

  int total() const { return n[0] + n[1] + n[2] + n[3]; }
  int trimer() const { return n[1] + n[2] + n[3]; }

  auto operator<=>(const FockState&) const = default;
};

/// All compositions of `total` into `modes` parts, ordered
/// lexicographically descending: (N,0,..,0) first, (0,..,0,N) last.
class FullBasis {
 public:
  FullBasis(int modes, int total);

  int modes() const { return modes_; }
  int total() const { return total_; }
  std::size_t size() const { return states_.size(); }

  const std::vector<int>& state(std::size_t i) const { return states_[i]; }
  const std::vector<std::vector<int>>& states() const { return states_; }

  /// Inverse of enumeration; empty when `occupations` is not in the basis.
  std::optional<std::size_t> index(const std::vector<int>& occupations) const;

 private:
  int modes_;
  int total_;
  std::vector<std::vector<int>> states_;
  std::map<std::vector<int>, std::size_t> lookup_;
};

FullBasis enumerate_full_basis(int modes, int total);

/// One term of a symmetry-adapted vector: Fock state and its sign.
struct SignedState {
  FockState state;
  int sign;
};

class SectorBasis {
 public:
  explicit SectorBasis(int total);

  int total() const { return total_; }
  std::size_t size() const { return reps_.size(); }
  bool empty() const { return reps_.empty(); }

  const FockState& representative(std::size_t i) const { return reps_[i]; }
  const std::vector<FockState>& representatives() const { return reps_; }

  /// Number of trimer bosons of vector i; x = trimer_count(i) / total().
  int trimer_count(std::size_t i) const { return reps_[i].trimer(); }

  /// Six signed Fock states of vector i in the term order of the
  /// symmetry-adapted expansion (three cyclic terms, then three transpositions).
  std::array<SignedState, 6> expansion(std::size_t i) const;

  /// Coefficient of each expansion term.
  static double amplitude();

  /// Sector index of an arbitrary Fock state together with the sign relating
  /// it to the representative. Empty when the trimer occupations repeat
  /// (such states have no overlap with the sector) or when N differs.
  std::optional<std::pair<std::size_t, int>> locate(const FockState& s) const;

 private:
  int total_;
  std::vector<FockState> reps_;
  std::map<FockState, std::size_t> lookup_;
};

SectorBasis build_sector_basis(int total);

/// (n1,n2,n3,n4) -> (n1,n4,n2,n3) applied to basis labels of a 4-mode
/// full-basis vector. Throws ContractViolation on dimension mismatch.
std::vector<double> apply_trimer_rotation(const FullBasis& basis, std::span<const double> v);

/// Dense isometry P (full size x sector size) whose columns are the
/// sector vectors in full-basis coordinates.
std::vector<std::vector<double>> sector_columns(const FullBasis& full, const SectorBasis& sector);

}  // namespace bhtherm
