#include <iostream>

#include "CLI11.hpp"
#include "nullrec/cli/experiments.hpp"

using namespace nullrec;

int main(int argc, char** argv) {
  CLI::App app{"nullrec: simulation and verification toolkit for ID processes driven by "
               "null-recurrent Markov chains"};
  app.require_subcommand(1);

  cli::RunOptions opts;
  std::string config;
  std::uint64_t seed = 0;
  int jobs = 0;
  bool no_plots = false;
  auto* run = app.add_subcommand("run", "run every experiment of a config file");
  run->add_option("config", config, "config file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
  auto* jobs_opt = run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--no-plots", no_plots, "skip SVG plots");
  run->add_flag("--quiet", opts.quiet, "no progress output");

  app.add_subcommand("list", "list experiment kinds");
  std::string kind;
  auto* describe = app.add_subcommand("describe", "show the schema of an experiment kind");
  describe->add_option("kind", kind, "experiment kind")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kUsage;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const auto& k : cli::experiment_kinds()) std::cout << k.kind << "\t" << k.summary << "\n";
      return cli::kPass;
    }
    if (app.got_subcommand("describe")) {
      std::cout << cli::describe_kind(kind);
      return cli::kPass;
    }
    if (*seed_opt) opts.seed = seed;
    if (*jobs_opt) opts.jobs = jobs;
    opts.plots = !no_plots;
    return cli::run_config(config, opts);
  } catch (const cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kUsage;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kUsage;
  } catch (const UnsupportedModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kUsage;
  } catch (const PrecisionError& e) {
    std::cerr << "precision error: " << e.what() << "\n";
    return cli::kPrecision;
  } catch (const EfficiencyError& e) {
    std::cerr << "efficiency error: " << e.what() << "\n";
    return cli::kPrecision;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return cli::kPrecision;
  }
}
