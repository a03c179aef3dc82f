// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <ostream>

#include "config.hpp"

namespace bhtherm::cli {

enum ExitCode : int { kSuccess = 0, kPartialFailure = 1, kConfigError = 2 };

/// Runs one experiment, writing CSVs and manifest.json into config.output.
/// Returns kSuccess only if every job finished.
int run(const RunConfig& config, std::ostream& log);

/// Renders SVG plots from the CSVs in a finished run directory. Missing
/// series are skipped with a warning; returns the number of plots written.
int emit_plots(const std::filesystem::path& dir, std::ostream& log);

/// Worker count from BHTHERM_WORKERS (0 when unset).
int configure_workers();

}  // namespace bhtherm::cli
