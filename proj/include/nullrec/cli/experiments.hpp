#pragma once

// The six experiment kinds and the config runner.
//
// Stream derivation: experiment <name> uses Rng(seed).split(fnv1a64(name));
// inside an experiment every ensemble takes a fixed split of that stream and
// replicate i uses ensemble.split(i). Outputs therefore depend only on the
// config and the seed, not on the thread count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nullrec/cli/config.hpp"
#include "nullrec/cli/report.hpp"
#include "nullrec/parallel.hpp"
#include "nullrec/rng.hpp"

namespace nullrec::cli {

[[nodiscard]] const std::vector<KindSpec>& experiment_kinds();
/// Throws ConfigError for an unknown kind.
[[nodiscard]] const KindSpec& find_kind(const std::string& kind);
/// Human-readable schema and purpose of one kind.
[[nodiscard]] std::string describe_kind(const std::string& kind);

[[nodiscard]] std::uint64_t fnv1a64(const std::string& s) noexcept;

[[nodiscard]] ExperimentResult run_experiment(const std::string& kind, const Params& params,
                                              Rng rng, Execution exec = Execution::parallel);

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  std::string out_dir = "nullrec_out";
  std::optional<int> jobs;
  bool plots = true;
  bool quiet = false;
};

/// Exit codes of `run`.
enum ExitCode : int { kPass = 0, kUsage = 1, kToleranceFailure = 2, kPrecision = 3 };

/// Runs every experiment of a config and writes results.csv, summary.txt,
/// timing.csv (wall-clock seconds per experiment), auxiliary CSV tables and
/// (unless disabled) plots/*.svg into out_dir.
/// Returns kPass or kToleranceFailure; configuration, precision and
/// efficiency errors propagate as exceptions.
[[nodiscard]] int run_config(const std::string& config_path, const RunOptions& options);

}  // namespace nullrec::cli
