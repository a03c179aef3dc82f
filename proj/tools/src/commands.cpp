// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <omp.h>

#include "output.hpp"

#ifndef BHTHERM_VERSION
#define BHTHERM_VERSION "unknown"
#endif

namespace bhtherm::cli {

namespace {

using json = nlohmann::ordered_json;

struct Context {
  const RunConfig& config;
  OutputDir& out;
  std::ostream& log;
  SpectrumCache cache;
  json metadata = json::object();
  std::vector<std::string> failures;
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  v.back() = hi;
  return v;
}

void write_density_series(Context& ctx, const std::vector<double>& times,
                          const std::vector<MonomerDensity>& series) {
  Csv pop({"t", "x_bin", "P"});
  Csv ent({"t", "entropy"});
  for (std::size_t k = 0; k < series.size(); ++k) {
    for (Eigen::Index i = 0; i < series[k].p.size(); ++i)
      pop << times[k] << series[k].x(static_cast<int>(i)) << series[k].p(i);
    ent << times[k] << entropy(series[k]);
  }
  ctx.out.write("population.csv", pop.str());
  ctx.out.write("entropy.csv", ent.str());
}

void write_profile(Context& ctx, const MonomerDensity& average, const MonomerDensity& thermal) {
  Csv csv({"x", "P_average", "P_thermal"});
  for (Eigen::Index i = 0; i < average.p.size(); ++i)
    csv << average.x(static_cast<int>(i)) << average.p(i) << thermal.p(i);
  ctx.out.write("profile.csv", csv.str());
}

void write_summary(Context& ctx, const std::vector<std::pair<std::string, double>>& values) {
  Csv csv({"quantity", "value"});
  for (const auto& [k, v] : values) csv << k << v;
  ctx.out.write("summary.csv", csv.str());
  for (const auto& [k, v] : values) ctx.metadata[k] = v;
}

void cmd_basis(Context& ctx) {
  const auto sector = ctx.cache.sector(ctx.config.N);
  Csv csv({"index", "n1", "n2", "n3", "n4", "x"});
  for (std::size_t i = 0; i < sector->size(); ++i) {
    const auto& s = sector->representative(i);
    csv << i << s.n[0] << s.n[1] << s.n[2] << s.n[3]
        << static_cast<double>(s.trimer()) / ctx.config.N;
  }
  ctx.out.write("basis.csv", csv.str());
  std::ostringstream h;
  write_coordinate(h, build_hamiltonian(ctx.config.params(), *sector));
  ctx.out.write("hamiltonian.txt", h.str());
  ctx.metadata["dimension"] = sector->size();
  ctx.log << fmt::format("sector dimension {}\n", sector->size());
}

void cmd_spectrum(Context& ctx) {
  const auto& c = ctx.config;
  const auto spectrum = ctx.cache.coupled(c.N, c.UN, c.omega);
  const auto uncoupled = ctx.cache.uncoupled(c.N, c.UN);
  Csv coupled({"index", "energy"});
  for (Eigen::Index i = 0; i < spectrum->values.size(); ++i)
    coupled << static_cast<long long>(i) << spectrum->values(i);
  ctx.out.write("coupled_spectrum.csv", coupled.str());
  auto order = uncoupled->levels;
  std::stable_sort(order.begin(), order.end(),
                   [](const UncoupledLevel& a, const UncoupledLevel& b) { return a.energy < b.energy; });
  Csv levels({"index", "energy", "eps", "x", "nu"});
  for (std::size_t i = 0; i < order.size(); ++i)
    levels << i << order[i].energy << order[i].eps << order[i].x.value() << order[i].nu;
  ctx.out.write("spectrum.csv", levels.str());

  const std::vector<double> e(spectrum->values.data(), spectrum->values.data() + spectrum->values.size());
  std::vector<std::pair<std::string, double>> summary{
      {"dimension", static_cast<double>(e.size())},
      {"mean_r", spacing_ratio(e).mean()},
      {"global_spacing", mean_level_spacing(e, SpacingWindow::global())},
  };
  try {
    const auto s = unfold_spectrum(e, {c.unfold_degree, c.edge_fraction});
    Csv sp({"s"});
    for (double v : s) sp << v;
    ctx.out.write("unfolded_spacings.csv", sp.str());
  } catch (const Error& err) {
    ctx.log << "warning: " << err.what() << '\n';
  }
  write_summary(ctx, summary);
}

void cmd_chaos_map(Context& ctx) {
  const auto& c = ctx.config;
  const auto uncoupled = ctx.cache.uncoupled(c.N, c.UN);
  const ChaosMap map = chaos_map(*uncoupled, c.ratio_window);
  Csv cells({"x", "eps", "mean_r", "n_levels"});
  for (const auto& cell : map.cells) cells << cell.x.value() << cell.eps << cell.mean_r << cell.n_levels;
  ctx.out.write("chaos_map.csv", cells.str());
  const ChaosGrid grid = rasterize(map, c.eps_bins);
  Csv g({"x", "eps_lo", "eps_hi", "mean_r"});
  for (std::size_t r = 0; r < grid.xs.size(); ++r)
    for (int b = 0; b < grid.eps_bins; ++b)
      g << grid.xs[r].value() << static_cast<double>(b) / grid.eps_bins
        << static_cast<double>(b + 1) / grid.eps_bins << grid.values(static_cast<Eigen::Index>(r), b);
  ctx.out.write("chaos_grid.csv", g.str());
}

void cmd_evolve_quantum(Context& ctx) {
  const auto& c = ctx.config;
  const auto sector = ctx.cache.sector(c.N);
  const auto uncoupled = ctx.cache.uncoupled(c.N, c.UN);
  const auto coupled = ctx.cache.coupled(c.N, c.UN, c.omega);
  const QuenchResult r = quantum_quench(ctx.cache, c.query(), c.omega, c.averaging());
  const InitialState init = prepare_initial(*uncoupled, coupled, c.x0, c.eps0);
  const auto times = linspace(0.0, c.horizon, c.series_samples);
  write_density_series(ctx, times, population_series(init.state, *sector, times));
  write_profile(ctx, r.average, r.thermal.density);
  write_summary(ctx, {{"x0", r.initial.x.value()},
                      {"eps0", r.initial.eps},
                      {"E0", r.energy.mean},
                      {"DeltaE", r.energy.width},
                      {"delta_rho", r.delta_rho},
                      {"delta_rho_error", r.delta_rho_error},
                      {"entropy_average", r.entropy_average},
                      {"entropy_late", r.entropy_late},
                      {"entropy_thermal", r.entropy_thermal}});
  ctx.log << fmt::format("delta_rho = {:.4f} +- {:.4f}\n", r.delta_rho, r.delta_rho_error);
}

void cmd_evolve_classical(Context& ctx) {
  const auto& c = ctx.config;
  const ClassicalQuench r = classical_quench(ctx.cache, c.query(), c.omega, c.classical_options());
  write_density_series(ctx, r.series.times, r.series.densities);
  write_profile(ctx, r.series.window_average, r.thermal.density);
  write_summary(ctx, {{"x0", r.initial.x.value()},
                      {"eps0", r.initial.eps},
                      {"E_target", r.E_target},
                      {"DeltaE", r.thermal.DeltaE},
                      {"delta_rho", r.delta_rho.value},
                      {"delta_rho_stderr", r.delta_rho.stderr_},
                      {"entropy_average", r.entropy_average},
                      {"entropy_late", r.entropy_late},
                      {"entropy_thermal", r.entropy_thermal},
                      {"acceptance_rate", r.ensemble.acceptance_rate()},
                      {"max_energy_drift", r.series.max_energy_drift},
                      {"max_norm_drift", r.series.max_norm_drift}});
  ctx.metadata["seed"] = c.seed;
  ctx.log << fmt::format("classical delta_rho = {:.4f} +- {:.4f}\n", r.delta_rho.value, r.delta_rho.stderr_);
}

void cmd_poincare(Context& ctx) {
  const auto& c = ctx.config;
  const auto sector = ctx.cache.sector(c.N);
  const auto uncoupled = ctx.cache.uncoupled(c.N, c.UN);
  const std::size_t level = select_level(*uncoupled, trimer_for(*uncoupled, c.x0), c.eps0);
  const ModelParams params = c.params();
  const auto h = build_hamiltonian(params, *sector);
  const double E = energy_moments(h, uncoupled->sector_vector(level, sector->size())).mean;
  SamplingOptions sampling;
  sampling.energy_rel_tol = c.shell_tol;
  const Ensemble seeds =
      sample_microcanonical(params, uncoupled->levels[level].x.value(), E, c.section_seeds, c.seed, sampling);
  const Section section = poincare_section(params, seeds.members,
                                           {c.section_time, c.reference_mode, c.max_points}, c.integrator());
  Csv csv({"u", "v"});
  for (const auto& p : section.points) csv << p.u << p.v;
  ctx.out.write("section.csv", csv.str());
  ctx.metadata["E"] = E;
  ctx.metadata["reference_mode"] = section.reference_mode;
  ctx.metadata["points"] = section.points.size();
  ctx.metadata["seed"] = c.seed;
  if (!section.diagnostic.empty()) {
    ctx.metadata["diagnostic"] = section.diagnostic;
    ctx.log << section.diagnostic;
  }
}

json threshold_json(const ThresholdResult& r) {
  return {{"omega_T", r.omega_T}, {"status", to_string(r.status)}, {"method", r.method},
          {"c", r.c},             {"bracket_lo", r.bracket_lo},    {"bracket_hi", r.bracket_hi}};
}

void cmd_threshold(Context& ctx) {
  const auto& c = ctx.config;
  Csv summary({"side", "omega_T", "status", "method", "c", "bracket_lo", "bracket_hi"});
  auto one = [&](Side side, const DeltaRhoEvaluator& eval) {
    try {
      const ThresholdResult r = find_threshold(eval, c.threshold_options());
      Csv sweep({"omega", "delta_rho", "error"});
      for (const auto& p : r.sweep) sweep << p.omega << p.delta_rho << p.error;
      ctx.out.write(fmt::format("sweep_{}.csv", to_string(side)), sweep.str());
      summary << to_string(side) << r.omega_T << to_string(r.status) << r.method << r.c << r.bracket_lo
              << r.bracket_hi;
      ctx.metadata[to_string(side)] = threshold_json(r);
      ctx.log << fmt::format("{}: omega_T = {:.5g} ({})\n", to_string(side), r.omega_T, to_string(r.status));
    } catch (const std::exception& e) {
      ctx.failures.push_back(fmt::format("{}: {}", to_string(side), e.what()));
    }
  };
  if (c.quantum) one(Side::quantum, quantum_evaluator(ctx.cache, c.query(), c.averaging()));
  if (c.classical) one(Side::classical, classical_evaluator(ctx.cache, c.query(), c.classical_options()));
  ctx.out.write("threshold.csv", summary.str());
}

void write_scan(Context& ctx, const std::string& name, const std::string& column,
                const std::vector<ScanRow>& rows) {
  Csv csv({column, "omega_T_quantum", "omega_T_classical", "status"});
  const double nan = std::nan("");
  for (const auto& row : rows) {
    const std::string status =
        fmt::format("{}/{}", row.quantum ? to_string(row.quantum->status) : "none",
                    row.classical ? to_string(row.classical->status) : "none");
    csv << row.parameter << (row.quantum ? row.quantum->omega_T : nan)
        << (row.classical ? row.classical->omega_T : nan) << status;
    if (!row.error.empty()) ctx.failures.push_back(fmt::format("{} = {}: {}", column, row.parameter, row.error));
  }
  ctx.out.write(name, csv.str());
}

void cmd_scan_eps(Context& ctx) {
  const auto& c = ctx.config;
  write_scan(ctx, "scan_eps.csv", "eps", scan_epsilon(ctx.cache, c.query(), c.eps_values, c.scan_options()));
}

void cmd_scan_un(Context& ctx) {
  const auto& c = ctx.config;
  write_scan(ctx, "scan_un.csv", "UN", scan_interaction(ctx.cache, c.query(), c.un_values, c.scan_options()));
}

void write_fit(Context& ctx, const std::string& name, const std::vector<std::pair<std::string, double>>& v) {
  Csv csv({"quantity", "value"});
  for (const auto& [k, x] : v) csv << k << x;
  ctx.out.write(name, csv.str());
  for (const auto& [k, x] : v) ctx.metadata[k] = x;
}

void cmd_scaling(Context& ctx) {
  const auto& c = ctx.config;
  const ScalingStudy st = scaling_study(ctx.cache, c.query(), c.n_values, c.scaling_options());
  Csv csv({"N", "omega", "delta_rho"});
  for (const auto& curve : st.curves)
    for (const auto& p : curve.points) csv << curve.N << p.omega << p.delta_rho;
  ctx.out.write("scaling.csv", csv.str());
  write_fit(ctx, "fit.csv",
            {{"a", st.fit.a},
             {"b", st.fit.b},
             {"residual_rms", st.fit.rms},
             {"collapse_metric", st.collapse_metric},
             {"omega_T_N_fit", st.omega_T_N_fit},
             {"omega_T_N_spread", st.omega_T_N_spread}});
}

void cmd_spacing_scaling(Context& ctx) {
  const auto& c = ctx.config;
  const SpacingStudy st = spacing_scaling(ctx.cache, c.UN, c.x0, c.n_values,
                                          SpacingWindow::between(c.local_lo, c.local_hi));
  Csv csv({"N", "global_spacing", "local_spacing"});
  for (const auto& r : st.rows) csv << r.N << r.global << r.local;
  ctx.out.write("spacing.csv", csv.str());
  write_fit(ctx, "fit.csv",
            {{"global_a", st.global_fit.a},
             {"global_b", st.global_fit.b},
             {"global_max_relative_residual", st.global_fit.max_relative},
             {"local_a", st.local_fit.a},
             {"local_b", st.local_fit.b},
             {"local_max_relative_residual", st.local_fit.max_relative}});
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int configure_workers() {
  const char* env = std::getenv("BHTHERM_WORKERS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError(fmt::format("BHTHERM_WORKERS='{}' is not a positive integer", env));
  omp_set_num_threads(static_cast<int>(n));
  return static_cast<int>(n);
}

int run(const RunConfig& config, std::ostream& log) {
  validate(config);
  const auto started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  OutputDir out(config.output);
  Context ctx{config, out, log, SpectrumCache{}, json::object(), {}};

  try {
    switch (config.command) {
      case Command::basis: cmd_basis(ctx); break;
      case Command::spectrum: cmd_spectrum(ctx); break;
      case Command::chaos_map: cmd_chaos_map(ctx); break;
      case Command::evolve_quantum: cmd_evolve_quantum(ctx); break;
      case Command::evolve_classical: cmd_evolve_classical(ctx); break;
      case Command::poincare: cmd_poincare(ctx); break;
      case Command::threshold: cmd_threshold(ctx); break;
      case Command::scan_eps: cmd_scan_eps(ctx); break;
      case Command::scan_un: cmd_scan_un(ctx); break;
      case Command::scaling: cmd_scaling(ctx); break;
      case Command::spacing_scaling: cmd_spacing_scaling(ctx); break;
    }
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  } catch (const std::exception& e) {
    ctx.failures.push_back(e.what());
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest;
  manifest["command"] = std::string(to_string(config.command));
  manifest["version"] = BHTHERM_VERSION;
  manifest["config"] = serialize_config(config);
  manifest["started_utc"] = started;
  manifest["wall_seconds"] = wall;
  manifest["workers"] = omp_get_max_threads();
  manifest["outputs"] = json::array();
  for (const auto& r : out.records())
    manifest["outputs"].push_back({{"file", r.name}, {"sha256", r.sha256}, {"bytes", r.bytes}});
  manifest["metadata"] = ctx.metadata;
  manifest["failures"] = ctx.failures;
  write_atomic(out.root() / "manifest.json", manifest.dump(2) + "\n");

  for (const auto& f : ctx.failures) log << "error: " << f << '\n';
  return ctx.failures.empty() ? kSuccess : kPartialFailure;
}

}  // namespace bhtherm::cli
