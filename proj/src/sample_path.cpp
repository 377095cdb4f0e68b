#include "nullrec/sample_path.hpp"

#include <algorithm>

#include "nullrec/errors.hpp"

namespace nullrec {

void validate_grid(std::span<const double> grid) {
  require(!grid.empty(), "grid must not be empty");
  require(grid.front() == 0.0, "grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    require(grid[i] > grid[i - 1], "grid must be strictly increasing");
  }
}

bool is_nondecreasing_from_zero(const SamplePath& path) {
  if (path.values.empty() || path.values.front() != 0.0) return false;
  return std::is_sorted(path.values.begin(), path.values.end());
}

double value_at(const SamplePath& path, double t) {
  const auto& g = path.grid;
  if (t <= g.front()) return path.values.front();
  if (t >= g.back()) return path.values.back();
  const auto it = std::upper_bound(g.begin(), g.end(), t);
  const auto i = static_cast<std::size_t>(it - g.begin());
  const double w = (t - g[i - 1]) / (g[i] - g[i - 1]);
  return (1.0 - w) * path.values[i - 1] + w * path.values[i];
}

std::vector<double> uniform_grid(double horizon, std::size_t intervals) {
  require(horizon > 0.0 && intervals > 0, "uniform_grid needs positive horizon and intervals");
  std::vector<double> g(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    g[i] = horizon * static_cast<double>(i) / static_cast<double>(intervals);
  }
  g.back() = horizon;
  return g;
}

}  // namespace nullrec
