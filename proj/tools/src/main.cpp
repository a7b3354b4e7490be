#include "ptwg/cli/commands.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  using namespace ptwg::cli;

  CLI::App app{"Spectral analysis of PT-symmetric strip waveguides"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "YAML configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides outputs.dir)");
    sub->add_option("--seed", seed, "solver seed (overrides solver.seed)");
  };
  CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues near a target");
  CLI::App* sweep = app.add_subcommand("sweep", "branch tracking and collision events");
  CLI::App* perturb = app.add_subcommand("perturb", "perturbation formulas and asymptotic fits");
  CLI::App* check = app.add_subcommand("check", "consistency checks");
  for (CLI::App* sub : {spectrum, sweep, perturb, check}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  RunConfig config;
  const int loaded = guarded(
      [&] {
        config = load_config(config_path);
        if (!out_dir.empty()) config.outputs.dir = out_dir;
        if (seed) config.solver.seed = *seed;
        return static_cast<int>(exit_ok);
      },
      std::cerr);
  if (loaded != exit_ok) return loaded;

  if (spectrum->parsed()) return cmd_spectrum(config, std::cout, std::cerr);
  if (sweep->parsed()) return cmd_sweep(config, std::cout, std::cerr);
  if (perturb->parsed()) return cmd_perturb(config, std::cout, std::cerr);
  return cmd_check(config, std::cout, std::cerr);
}
