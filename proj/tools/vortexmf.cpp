#include <iostream>

#include "CLI11.hpp"

#include "vortexmf/cli.hpp"

namespace {

void add_common(CLI::App* sub, vortexmf::cli::Options& opt) {
  sub->add_option("--config", opt.config_path, "run configuration (JSON)")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", opt.out,
                  std::string("output directory (default: $") +
                      vortexmf::cli::kOutputDirEnv + " or " +
                      vortexmf::cli::kDefaultOutputDir + ")");
  sub->add_option("--seed", opt.seed, "override the config seed");
  sub->add_flag("--overwrite", opt.overwrite, "replace existing output files");
}

} // namespace

int main(int argc, char** argv) {
  using vortexmf::cli::Mode;

  CLI::App app{"Mean-field thermodynamics and Monte Carlo for nearly parallel vortex filaments"};
  app.require_subcommand(1);

  vortexmf::cli::Options opt;
  auto* thermo = app.add_subcommand("thermo", "closed-form thermodynamic sweep");
  auto* simulate = app.add_subcommand("simulate", "Metropolis simulation with checkpoints");
  auto* verify = app.add_subcommand("verify", "run the independent oracle checks");
  for (auto* sub : {thermo, simulate, verify}) add_common(sub, opt);
  simulate->add_option("--resume", opt.resume, "continue from a checkpoint")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vortexmf::cli::ExitCode::usage;
  }

  if (thermo->parsed()) opt.mode = Mode::thermo;
  if (simulate->parsed()) opt.mode = Mode::simulate;
  if (verify->parsed()) opt.mode = Mode::verify;
  return vortexmf::cli::run(opt, std::cout, std::cerr);
}
