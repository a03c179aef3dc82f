// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bhtherm/analysis.hpp"

namespace bhtherm::cli {

/// Bad configuration text or values; the CLI exits with code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command {
  basis,
  spectrum,
  chaos_map,
  evolve_quantum,
  evolve_classical,
  poincare,
  threshold,
  scan_eps,
  scan_un,
  scaling,
  spacing_scaling,
};

std::string_view to_string(Command c);
Command parse_command(std::string_view name);
const std::vector<Command>& all_commands();

struct RunConfig {
  Command command = Command::evolve_quantum;
  std::string output = "out";

  // [model]
  int N = 40;
  double UN = 10.0;
  double omega = 0.1;

  // [initial]
  double x0 = 0.6;
  double eps0 = 0.3;

  // [evolution]
  double horizon = 2000.0;
  double window_start = 0.5;
  int samples = 400;
  int series_samples = 201;  ///< P(x, t) rows written over [0, T]

  // [spectral]
  int ratio_window = 21;
  int eps_bins = 20;
  int unfold_degree = 10;
  double edge_fraction = 0.02;
  double local_lo = 0.2;
  double local_hi = 0.3;

  // [classical]
  std::size_t members = 1000;
  std::uint64_t seed = 1;
  int bootstrap = 200;
  double abs_tol = 1e-15;
  double rel_tol = 1e-15;
  double energy_tol = 1e-8;
  double norm_tol = 1e-10;
  double shell_tol = 1e-8;

  // [poincare]
  std::size_t section_seeds = 20;
  double section_time = 2000.0;
  int reference_mode = -1;
  std::size_t max_points = 100000;

  // [sweep]
  double c = 0.1;
  double omega_min = 0.01;
  double omega_max = 1.0;
  int omega_points = 13;
  int bisections = 3;
  bool quantum = true;
  bool classical = true;
  std::vector<double> eps_values{0.2, 0.25, 0.3, 0.35, 0.4};
  std::vector<double> un_values{5.0, 10.0, 15.0, 20.0};
  std::vector<int> n_values{20, 30, 40, 50};
  std::vector<double> omega_n = log_grid(0.5, 20.0, 9);

  ModelParams params() const { return ModelParams::from_interaction(UN, N, omega); }
  QuenchQuery query() const { return {N, UN, x0, eps0}; }
  AveragingOptions averaging() const { return {horizon, window_start, samples}; }
  IntegratorOptions integrator() const;
  ClassicalRunOptions classical_options() const;
  ThresholdOptions threshold_options() const;
  ScanOptions scan_options() const;
  ScalingOptions scaling_options() const;
};

/// Parses the `key = value` format with `[section]` headers. '#' and ';'
/// start comments. Lists are comma separated. Unknown sections or keys,
/// duplicates and bad values raise ConfigError naming the line. Cross-field
/// checks are left to validate().
RunConfig parse_config(std::string_view text);

/// Applies one `section.key=value` override.
void apply_override(RunConfig& config, std::string_view assignment);

/// Canonical text: every key, fixed order, shortest round-trip numbers. Parsing
/// the result gives back an identical RunConfig.
std::string serialize_config(const RunConfig& config);

/// Range and consistency checks; raises ConfigError.
void validate(const RunConfig& config);

}  // namespace bhtherm::cli
