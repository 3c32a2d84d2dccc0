#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "fzwave/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "fzwave: spectral simulator for viscoelastic waves with fractional "
      "memory, with built-in energy and stress verification"};
  app.require_subcommand(1);

  std::string run_config;
  auto* run = app.add_subcommand("run", "execute a configured simulation");
  run->add_option("config", run_config, "path to a JSON configuration")
      ->required();

  std::string study_config;
  int levels = 3;
  auto* study = app.add_subcommand(
      "study", "rerun a configuration with halved time steps and report "
               "observed convergence orders");
  study->add_option("config", study_config, "path to a JSON configuration")
      ->required();
  study->add_option("--levels", levels, "number of refinement levels")
      ->check(CLI::PositiveNumber);

  double alpha = 0.5, gamma = 1.0, dt = 0.01;
  int n = 100;
  auto* table = app.add_subcommand(
      "table-mlf", "tabulate the relaxation kernel, its rate, and its "
                   "running integral");
  table->add_option("--alpha", alpha, "fractional order in (0, 1]")
      ->required();
  table->add_option("--gamma", gamma, "kernel rate, positive")->required();
  table->add_option("--dt", dt, "tabulation step")->required();
  table->add_option("--n", n, "number of steps")->required();

  long seed = 12345;
  auto* check = app.add_subcommand(
      "check", "run the randomized dissipation-positivity and "
               "convolution-norm suites with their negative controls");
  check->add_option("--seed", seed, "random seed for the trial histories");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
    return fzwave::run_command(run_config, std::cout, std::cerr);
  if (study->parsed())
    return fzwave::study_command(study_config, levels, std::cout, std::cerr);
  if (table->parsed())
    return fzwave::table_mlf_command(alpha, gamma, dt, n, std::cout,
                                     std::cerr);
  return fzwave::check_command(seed, std::cout, std::cerr);
}
