// mfm: command-line front end for the mean field cortex toolkit.

#include "mfm/config.hpp"
#include "mfm/errors.hpp"
#include "mfm/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Mean field cortex model: simulation and global-dynamics analysis"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string theta;
  std::size_t snapshot_every = 0;
  int threads = 0;

  const char* names[] = {"simulate", "equilibrium", "noncompactness", "absorbing", "oracle-check"};
  const char* help[] = {"integrate the field equations and write snapshots and monitors",
                        "solve for the space-homogeneous equilibrium",
                        "check the hypotheses of the noncompactness test",
                        "closed-form absorbing-set constants",
                        "compare the spectral solver with the Poisson representation"};
  for (int k = 0; k < 5; ++k) {
    CLI::App* sub = app.add_subcommand(names[k], help[k]);
    sub->add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory, or report path ending in .json");
    sub->add_option("--theta", theta, "Lyapunov weight: a number or 'auto'");
    sub->add_option("--snapshot-every", snapshot_every, "snapshot stride in steps");
    sub->add_option("--threads", threads, "OpenMP threads (falls back to MFM_THREADS)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : mfm::kExitError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const auto cmd = mfm::parse_subcommand(chosen->get_name());
  mfm::RunOptions opts;
  if (!out.empty()) opts.out = out;
  if (!theta.empty()) opts.theta = theta;
  if (chosen->count("--snapshot-every") > 0) opts.snapshot_every = snapshot_every;
  opts.threads = threads;

  try {
    const mfm::RunConfig cfg = mfm::parse_config(config);
    return mfm::run_subcommand(*cmd, cfg, opts, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mfm::kExitError;
  }
}
