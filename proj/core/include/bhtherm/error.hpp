// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace bhtherm {

/// Raised when a caller breaks a documented precondition (dimension
/// mismatch, wrong particle number, negative occupations, ...).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Raised for recoverable runtime failures: a computation was asked for
/// something it cannot deliver with the given data.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace bhtherm
