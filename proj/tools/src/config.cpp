// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace bhtherm::cli {

namespace {

constexpr std::pair<Command, std::string_view> kCommandNames[] = {
    {Command::basis, "basis"},
    {Command::spectrum, "spectrum"},
    {Command::chaos_map, "chaos-map"},
    {Command::evolve_quantum, "evolve-quantum"},
    {Command::evolve_classical, "evolve-classical"},
    {Command::poincare, "poincare"},
    {Command::threshold, "threshold"},
    {Command::scan_eps, "scan-eps"},
    {Command::scan_un, "scan-un"},
    {Command::scaling, "scaling"},
    {Command::spacing_scaling, "spacing-scaling"},
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

template <typename T>
T parse_number(std::string_view text) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ConfigError(fmt::format("'{}' is not a valid number", text));
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError(fmt::format("'{}' is not finite", text));
  }
  return value;
}

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ConfigError(fmt::format("'{}' is not a boolean", text));
}

template <typename T>
std::vector<T> parse_list(std::string_view text) {
  std::vector<T> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_number<T>(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
std::string print_list(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      s += fmt_double(v[i]);
    } else {
      s += std::to_string(v[i]);
    }
  }
  return s;
}

struct Field {
  std::string_view section;
  std::string_view key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field number(std::string_view section, std::string_view key, T RunConfig::*member) {
  return {section, key, [member](RunConfig& c, std::string_view v) { c.*member = parse_number<T>(v); },
          [member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return fmt_double(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          }};
}

Field flag(std::string_view section, std::string_view key, bool RunConfig::*member) {
  return {section, key, [member](RunConfig& c, std::string_view v) { c.*member = parse_bool(v); },
          [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

template <typename T>
Field list(std::string_view section, std::string_view key, std::vector<T> RunConfig::*member) {
  return {section, key, [member](RunConfig& c, std::string_view v) { c.*member = parse_list<T>(v); },
          [member](const RunConfig& c) { return print_list(c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"run", "command",
       [](RunConfig& c, std::string_view v) { c.command = parse_command(trim(v)); },
       [](const RunConfig& c) { return std::string(to_string(c.command)); }},
      {"run", "output", [](RunConfig& c, std::string_view v) { c.output = std::string(trim(v)); },
       [](const RunConfig& c) { return c.output; }},
      number("model", "N", &RunConfig::N),
      number("model", "UN", &RunConfig::UN),
      number("model", "omega", &RunConfig::omega),
      number("initial", "x0", &RunConfig::x0),
      number("initial", "eps0", &RunConfig::eps0),
      number("evolution", "horizon", &RunConfig::horizon),
      number("evolution", "window_start", &RunConfig::window_start),
      number("evolution", "samples", &RunConfig::samples),
      number("evolution", "series_samples", &RunConfig::series_samples),
      number("spectral", "ratio_window", &RunConfig::ratio_window),
      number("spectral", "eps_bins", &RunConfig::eps_bins),
      number("spectral", "unfold_degree", &RunConfig::unfold_degree),
      number("spectral", "edge_fraction", &RunConfig::edge_fraction),
      number("spectral", "local_lo", &RunConfig::local_lo),
      number("spectral", "local_hi", &RunConfig::local_hi),
      number("classical", "members", &RunConfig::members),
      number("classical", "seed", &RunConfig::seed),
      number("classical", "bootstrap", &RunConfig::bootstrap),
      number("classical", "abs_tol", &RunConfig::abs_tol),
      number("classical", "rel_tol", &RunConfig::rel_tol),
      number("classical", "energy_tol", &RunConfig::energy_tol),
      number("classical", "norm_tol", &RunConfig::norm_tol),
      number("classical", "shell_tol", &RunConfig::shell_tol),
      number("poincare", "seeds", &RunConfig::section_seeds),
      number("poincare", "time", &RunConfig::section_time),
      number("poincare", "reference_mode", &RunConfig::reference_mode),
      number("poincare", "max_points", &RunConfig::max_points),
      number("sweep", "c", &RunConfig::c),
      number("sweep", "omega_min", &RunConfig::omega_min),
      number("sweep", "omega_max", &RunConfig::omega_max),
      number("sweep", "omega_points", &RunConfig::omega_points),
      number("sweep", "bisections", &RunConfig::bisections),
      flag("sweep", "quantum", &RunConfig::quantum),
      flag("sweep", "classical", &RunConfig::classical),
      list("sweep", "eps_values", &RunConfig::eps_values),
      list("sweep", "un_values", &RunConfig::un_values),
      list("sweep", "n_values", &RunConfig::n_values),
      list("sweep", "omega_n", &RunConfig::omega_n),
  };
  return table;
}

const Field* find_field(std::string_view section, std::string_view key) {
  for (const auto& f : fields())
    if (f.section == section && f.key == key) return &f;
  return nullptr;
}

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& [cmd, name] : kCommandNames)
    if (cmd == c) return name;
  return "?";
}

Command parse_command(std::string_view name) {
  for (const auto& [cmd, n] : kCommandNames)
    if (n == name) return cmd;
  throw ConfigError(fmt::format("unknown command '{}'", name));
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> cmds = [] {
    std::vector<Command> v;
    for (const auto& [cmd, name] : kCommandNames) v.push_back(cmd);
    return v;
  }();
  return cmds;
}

IntegratorOptions RunConfig::integrator() const {
  IntegratorOptions o;
  o.abs_tol = abs_tol;
  o.rel_tol = rel_tol;
  o.energy_tol = energy_tol;
  o.norm_tol = norm_tol;
  return o;
}

ClassicalRunOptions RunConfig::classical_options() const {
  ClassicalRunOptions o;
  o.members = members;
  o.seed = seed;
  o.averaging = averaging();
  o.bootstrap_resamples = bootstrap;
  o.integrator = integrator();
  o.sampling.energy_rel_tol = shell_tol;
  return o;
}

ThresholdOptions RunConfig::threshold_options() const {
  ThresholdOptions o;
  o.c = c;
  o.grid = log_grid(omega_min, omega_max, omega_points);
  o.max_bisections = bisections;
  return o;
}

ScanOptions RunConfig::scan_options() const {
  ScanOptions o;
  o.threshold = threshold_options();
  o.averaging = averaging();
  o.classical = classical_options();
  o.run_quantum = quantum;
  o.run_classical = classical;
  return o;
}

ScalingOptions RunConfig::scaling_options() const {
  ScalingOptions o;
  o.c = c;
  o.omega_n_grid = omega_n;
  o.averaging = averaging();
  return o;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::string section;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(fmt::format("line {}: unterminated section header", line_no));
      section = std::string(trim(line.substr(1, line.size() - 2)));
      const bool known = std::any_of(fields().begin(), fields().end(),
                                     [&](const Field& f) { return f.section == section; });
      if (!known) throw ConfigError(fmt::format("line {}: unknown section [{}]", line_no, section));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(fmt::format("line {}: key '{}' outside any section", line_no, key));
    const Field* f = find_field(section, key);
    if (!f) throw ConfigError(fmt::format("line {}: unknown key '{}' in [{}]", line_no, key, section));
    if (!seen.emplace(section, key).second)
      throw ConfigError(fmt::format("line {}: duplicate key '{}' in [{}]", line_no, key, section));
    try {
      f->set(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}.{}: {}", line_no, section, key, e.what()));
    }
  }
  return config;
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq)
    throw ConfigError(fmt::format("override '{}' is not of the form section.key=value", assignment));
  const auto section = trim(assignment.substr(0, dot));
  const auto key = trim(assignment.substr(dot + 1, eq - dot - 1));
  const Field* f = find_field(section, key);
  if (!f) throw ConfigError(fmt::format("override: unknown key '{}.{}'", section, key));
  try {
    f->set(config, assignment.substr(eq + 1));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("override {}.{}: {}", section, key, e.what()));
  }
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  std::string_view section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(config) << '\n';
  }
  return out.str();
}

void validate(const RunConfig& c) {
  auto check = [](bool ok, std::string_view what) {
    if (!ok) throw ConfigError(std::string(what));
  };
  check(c.N >= 3, "model.N must be at least 3 (the sector is empty below)");
  check(c.UN > 0.0, "model.UN must be positive (repulsive on-site interaction)");
  check(c.omega >= 0.0, "model.omega must be non-negative");
  check(c.x0 > 0.0 && c.x0 <= 1.0, "initial.x0 must lie in (0, 1]");
  check(c.eps0 >= 0.0 && c.eps0 <= 1.0, "initial.eps0 must lie in [0, 1]");
  check(c.horizon > 0.0, "evolution.horizon must be positive");
  check(c.window_start >= 0.0 && c.window_start < 1.0, "evolution.window_start must lie in [0, 1)");
  check(c.samples >= 4, "evolution.samples must be at least 4");
  check(c.series_samples >= 2, "evolution.series_samples must be at least 2");
  check(c.ratio_window >= 3, "spectral.ratio_window must be at least 3");
  check(c.eps_bins >= 1, "spectral.eps_bins must be positive");
  check(c.unfold_degree >= 1, "spectral.unfold_degree must be positive");
  check(c.edge_fraction >= 0.0 && c.edge_fraction < 0.5, "spectral.edge_fraction must lie in [0, 0.5)");
  check(c.local_lo < c.local_hi, "spectral.local_lo must be below local_hi");
  check(c.members >= 2, "classical.members must be at least 2");
  check(c.bootstrap >= 2, "classical.bootstrap must be at least 2");
  check(c.abs_tol > 0.0 && c.rel_tol > 0.0, "classical tolerances must be positive");
  check(c.energy_tol > 0.0 && c.norm_tol > 0.0 && c.shell_tol > 0.0, "classical drift bounds must be positive");
  check(c.section_seeds >= 1, "poincare.seeds must be positive");
  check(c.section_time > 0.0, "poincare.time must be positive");
  check(c.reference_mode >= -1 && c.reference_mode <= 3 && c.reference_mode != 1,
        "poincare.reference_mode must be -1, 0, 2 or 3");
  check(c.c > 0.0, "sweep.c must be positive");
  check(c.omega_min > 0.0 && c.omega_max > c.omega_min, "sweep needs 0 < omega_min < omega_max");
  check(c.omega_points >= 2, "sweep.omega_points must be at least 2");
  check(c.bisections >= 0, "sweep.bisections must be non-negative");
  check(!c.eps_values.empty() && !c.un_values.empty(), "sweep lists must not be empty");
  for (double e : c.eps_values) check(e >= 0.0 && e <= 1.0, "sweep.eps_values must lie in [0, 1]");
  for (double u : c.un_values) check(u > 0.0, "sweep.un_values must be positive");
  for (int n : c.n_values) check(n >= 3, "sweep.n_values must be at least 3");
  check(c.omega_n.size() >= 2 && std::is_sorted(c.omega_n.begin(), c.omega_n.end()) && c.omega_n.front() > 0.0,
        "sweep.omega_n must be positive and ascending");

  // x0 must be one of the k / N values carrying sector states (k >= 3)
  auto on_grid = [&](int n) {
    const double k = c.x0 * n;
    if (std::abs(k - std::round(k)) > 1e-9 || std::lround(k) < 3) {
      throw ConfigError(fmt::format("initial.x0 = {} is not k/N with integer k >= 3 for N = {}", c.x0, n));
    }
  };
  switch (c.command) {
    case Command::basis:
    case Command::spectrum:
    case Command::chaos_map:
      break;
    case Command::scaling:
    case Command::spacing_scaling:
      check(c.n_values.size() >= 4, "sweep.n_values needs at least four entries for a scaling study");
      for (int n : c.n_values) on_grid(n);
      break;
    default:
      on_grid(c.N);
  }
}

}  // namespace bhtherm::cli
