#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace nullrec {

/// One realization of a process on a time grid.
struct SamplePath {
  std::vector<double> grid;
  std::vector<double> values;
  std::string label;
  /// Free-form numeric diagnostics (series remainder variance, warnings, ...).
  std::map<std::string, double> meta;

  [[nodiscard]] std::size_t size() const noexcept { return grid.size(); }
};

/// Throws ParameterError unless the grid is strictly increasing from 0.
void validate_grid(std::span<const double> grid);

/// True when values are nondecreasing and start at zero.
[[nodiscard]] bool is_nondecreasing_from_zero(const SamplePath& path);

/// Linear-interpolated value of the path at time t (clamped to the grid).
[[nodiscard]] double value_at(const SamplePath& path, double t);

/// Evenly spaced grid 0, T/k, ..., T.
[[nodiscard]] std::vector<double> uniform_grid(double horizon, std::size_t intervals);

}  // namespace nullrec
