// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace bhtherm::cli;

namespace {

RunConfig load(const std::string& path, Command command, const std::vector<std::string>& overrides,
               const std::string& output) {
  RunConfig config;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream text;
    text << in.rdbuf();
    config = parse_config(text.str());
    if (text.str().find("command") != std::string::npos && config.command != command) {
      throw ConfigError("config file is for '" + std::string(to_string(config.command)) +
                        "', not '" + std::string(to_string(command)) + "'");
    }
  }
  config.command = command;
  for (const auto& o : overrides) apply_override(config, o);
  if (!output.empty()) config.output = output;
  validate(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monomer-trimer Bose-Hubbard thermalization experiments"};
  app.require_subcommand(1);

  std::string config_path, output, plot_dir;
  std::vector<std::string> overrides;
  bool print_config = false;

  for (Command cmd : all_commands()) {
    auto* sub = app.add_subcommand(std::string(to_string(cmd)));
    sub->add_option("-c,--config", config_path, "key = value config file");
    sub->add_option("-s,--set", overrides, "override, e.g. model.N=40")->take_all();
    sub->add_option("-o,--output", output, "output directory");
    sub->add_flag("--print-config", print_config, "print the resolved config and exit");
  }
  auto* plot = app.add_subcommand("plot", "render SVG plots from a run directory");
  plot->add_option("dir", plot_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigError;
  }

  try {
    configure_workers();
    if (plot->parsed()) {
      emit_plots(plot_dir, std::cout);
      return kSuccess;
    }
    for (Command cmd : all_commands()) {
      if (!app.got_subcommand(std::string(to_string(cmd)))) continue;
      const RunConfig config = load(config_path, cmd, overrides, output);
      if (print_config) {
        std::cout << serialize_config(config);
        return kSuccess;
      }
      return run(config, std::cerr);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPartialFailure;
  }
  return kConfigError;
}
