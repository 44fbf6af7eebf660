#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gmhp/cli.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
  std::string out_dir;
  bool out_dir_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "run configuration file (JSON)")
      ->required();
  cmd->add_option("--seed", args.seed, "override the config seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--jobs", args.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out-dir", args.out_dir, "directory for relative output paths")
      ->each([&args](const std::string&) { args.out_dir_set = true; });
}

gmhp::RunConfig load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw gmhp::ConfigError("(file)", "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return gmhp::parse_run_config(buffer.str());
}

gmhp::CliOverrides to_overrides(const CommonArgs& args) {
  gmhp::CliOverrides overrides;
  if (args.seed_set) overrides.seed = args.seed;
  overrides.jobs = args.jobs;
  if (args.out_dir_set) overrides.out_dir = args.out_dir;
  return overrides;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized multivariate Hawkes process simulator"};
  app.require_subcommand(1);

  CommonArgs simulate_args, validate_args, trace_args;
  auto* simulate = app.add_subcommand("simulate", "simulate paths and write event files");
  add_common(simulate, simulate_args);
  auto* validate =
      app.add_subcommand("validate", "run diagnostics gates and write a report");
  add_common(validate, validate_args);
  auto* trace = app.add_subcommand("trace", "write an intensity trace");
  add_common(trace, trace_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return gmhp::cmd_simulate(load_config(simulate_args.config_path),
                                to_overrides(simulate_args), std::cout, std::cerr);
    }
    if (validate->parsed()) {
      return gmhp::cmd_validate(load_config(validate_args.config_path),
                                to_overrides(validate_args), std::cout, std::cerr);
    }
    return gmhp::cmd_trace(load_config(trace_args.config_path), to_overrides(trace_args),
                           std::cout, std::cerr);
  } catch (const gmhp::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gmhp::kExitConfigError;
  } catch (const gmhp::TruncationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gmhp::kExitTruncation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gmhp::kExitConfigError;
  }
}
