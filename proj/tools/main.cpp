#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rescoef/commands.hpp"
#include "rescoef/errors.hpp"
#include "rescoef/io.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool out_set = false;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file (JSON)")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", args.seed, "RNG seed (overrides config)");
}

rescoef::CliOverrides overrides_from(const CLI::App* cmd, const CommonArgs& args) {
  rescoef::CliOverrides ov;
  if (cmd->count("--out") > 0) ov.out_dir = args.out_dir;
  if (cmd->count("--seed") > 0) ov.seed = args.seed;
  return ov;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resolvent-based coefficient identification and greedy snapshot selection"};
  app.require_subcommand(1);

  CommonArgs greedy_args, density_args, verify_args, online_args, minimax_args;
  std::string verify_check;

  CLI::App* greedy = app.add_subcommand("greedy", "weak greedy over a diffusivity family");
  add_common(greedy, greedy_args);
  CLI::App* density =
      app.add_subcommand("density-greedy", "weak greedy over a density family");
  add_common(density, density_args);
  CLI::App* verify = app.add_subcommand("verify", "run a verification report");
  verify->add_option("check", verify_check,
                     "one of: theorem1, norm-identity, surrogate, density, operator-identity")
      ->required();
  add_common(verify, verify_args);
  CLI::App* online = app.add_subcommand("online", "approximate a new resolvent from a basis");
  add_common(online, online_args);
  CLI::App* minimax = app.add_subcommand("minimax", "solve a sup-norm approximation problem");
  add_common(minimax, minimax_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (greedy->parsed()) {
      const auto job = rescoef::parse_greedy_config(
          rescoef::read_text_file(greedy_args.config_path),
          rescoef::CoefficientKind::diffusivity, overrides_from(greedy, greedy_args));
      return rescoef::run_greedy(job);
    }
    if (density->parsed()) {
      const auto job = rescoef::parse_greedy_config(
          rescoef::read_text_file(density_args.config_path), rescoef::CoefficientKind::density,
          overrides_from(density, density_args));
      return rescoef::run_greedy(job);
    }
    if (verify->parsed()) {
      const auto job =
          rescoef::parse_verify_config(rescoef::read_text_file(verify_args.config_path),
                                       verify_check, overrides_from(verify, verify_args));
      return rescoef::run_verify(job);
    }
    if (online->parsed()) {
      const auto job = rescoef::parse_online_config(
          rescoef::read_text_file(online_args.config_path), overrides_from(online, online_args));
      return rescoef::run_online(job);
    }
    if (minimax->parsed()) {
      const std::filesystem::path cfg(minimax_args.config_path);
      const auto job = rescoef::parse_minimax_config(rescoef::read_text_file(cfg),
                                                     cfg.parent_path(),
                                                     overrides_from(minimax, minimax_args));
      return rescoef::run_minimax(job);
    }
  } catch (const rescoef::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rescoef::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const rescoef::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
